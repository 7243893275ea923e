// liouville.hpp — Bloch-Redfield generator, propagation and eigenmodes
#pragma once

#include "bath.hpp"
#include "model.hpp"
#include "units.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace exciton2des {

using cplx = std::complex<double>;
using Mat4c = Eigen::Matrix4cd;
using Mat16c = Eigen::Matrix<cplx, 16, 16>;
using Vec16c = Eigen::Matrix<cplx, 16, 1>;

inline constexpr cplx I{0.0, 1.0};

// Row-major vectorization: vec(rho)[4 i + j] = rho(i, j), so that
// vec(A rho B) = kron(A, B^T) vec(rho).
constexpr int vec_index(int i, int j) { return 4 * i + j; }

inline Vec16c vec(const Mat4c& rho) {
    Vec16c v;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(vec_index(i, j)) = rho(i, j);
    return v;
}

inline Mat4c unvec(const Vec16c& v) {
    Mat4c rho;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho(i, j) = v(vec_index(i, j));
    return rho;
}

// Excitation manifold of an exciton-basis level: g -> 0, eps1/eps2 -> 1, f -> 2.
constexpr int manifold(int level) { return level == 0 ? 0 : (level == 3 ? 2 : 1); }

// A block of Liouville space: all |a><b| with a in manifold `ket`, b in `bra`.
struct Sector {
    int ket = 0;
    int bra = 0;

    std::vector<int> indices() const {
        std::vector<int> out;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                if (manifold(a) == ket && manifold(b) == bra) out.push_back(vec_index(a, b));
        return out;
    }
    std::string name() const {
        static const char* n[] = {"g", "e", "f"};
        return std::string(n[ket]) + n[bra];
    }
    int id() const { return 3 * ket + bra; }
    bool operator==(const Sector&) const = default;
};

inline std::array<Sector, 9> all_sectors() {
    std::array<Sector, 9> s;
    for (int k = 0; k < 3; ++k)
        for (int b = 0; b < 3; ++b) s[3 * k + b] = Sector{k, b};
    return s;
}

inline Sector sector_of(int vec_idx) { return Sector{manifold(vec_idx / 4), manifold(vec_idx % 4)}; }

// Single-excitation ordering used by the Y superoperator: {11, 22, 12, 21}.
inline std::vector<int> single_excitation_indices() {
    return {vec_index(1, 1), vec_index(2, 2), vec_index(1, 2), vec_index(2, 1)};
}

// Site number operators s_j = sigma_j^+ sigma_j^- in the exciton basis.
inline std::array<Eigen::Matrix4d, 2> site_number_operators(const ExcitonBasis& b) {
    Eigen::Matrix4d s1 = Eigen::Vector4d(0, 1, 0, 1).asDiagonal();
    Eigen::Matrix4d s2 = Eigen::Vector4d(0, 0, 1, 1).asDiagonal();
    const Eigen::Matrix4d& v = b.vectors;
    return {v.transpose() * s1 * v, v.transpose() * s2 * v};
}

struct LiouvilleGenerator {
    Mat16c matrix = Mat16c::Zero();
    bool secular = false;
    std::string basis = "exciton";

    Eigen::MatrixXcd block(const std::vector<int>& idx) const {
        Eigen::MatrixXcd m(idx.size(), idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t c = 0; c < idx.size(); ++c) m(r, c) = matrix(idx[r], idx[c]);
        return m;
    }
    Eigen::MatrixXcd block(const Sector& s) const { return block(s.indices()); }
};

inline bool is_population(int vec_idx) { return vec_idx / 4 == vec_idx % 4; }

// Secular form: keep population-population couplings and diagonal elements only.
inline void secularize(Mat16c& l) {
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b)
            if (a != b && !(is_population(a) && is_population(b))) l(a, b) = 0.0;
}

inline LiouvilleGenerator build_generator(const ExcitonBasis& basis, const BathSpec& bath,
                                          bool secular = false) {
    bath.validate();
    const auto e = basis.energies();
    const auto s = site_number_operators(basis);
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();

    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    for (int n = 0; n < 4; ++n) h(n, n) = units::kappa * e[n];

    Mat16c l = -I * (Eigen::kroneckerProduct(h, id).eval() -
                     Eigen::kroneckerProduct(id, h.transpose()).eval());

    for (int j = 0; j < 2; ++j) {
        const Eigen::Matrix4cd sj = s[j].cast<cplx>();
        for (int k = 0; k < 2; ++k) {
            Eigen::Matrix4cd q = Eigen::Matrix4cd::Zero(), qh = Eigen::Matrix4cd::Zero();
            for (int n = 0; n < 4; ++n)
                for (int m = 0; m < 4; ++m) {
                    if (s[k](n, m) == 0.0) continue;
                    q(n, m) = s[k](n, m) * 0.5 * cross_spectral(j + 1, k + 1, e[m] - e[n], bath);
                    qh(n, m) = s[k](n, m) * 0.5 * cross_spectral(k + 1, j + 1, e[n] - e[m], bath);
                }
            l += -Eigen::kroneckerProduct((sj * q).eval(), id).eval();
            l += Eigen::kroneckerProduct(q, sj.transpose()).eval();
            l += -Eigen::kroneckerProduct(id, (qh * sj).transpose().eval()).eval();
            l += Eigen::kroneckerProduct(sj, qh.transpose()).eval();
        }
    }
    if (secular) secularize(l);
    return LiouvilleGenerator{l, secular, "exciton"};
}

// ---------------------------------------------------------------------------
// Eigenmodes

class near_defective_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModeOrder {
    none,
    // oscillatory modes by descending Im, then the rest by ascending Re
    oscillatory_first,
    ascending_imag,
};

inline constexpr double defective_condition_limit = 1e8;
inline constexpr double degenerate_gap = 1e-12;

struct EigenModes {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd right;  // columns
    Eigen::MatrixXcd left;   // rows, left = right^-1
    std::vector<bool> oscillatory;
    double condition = 1.0;
    bool degenerate = false;

    int size() const { return static_cast<int>(values.size()); }
    bool well_conditioned() const { return condition <= defective_condition_limit; }
    Eigen::MatrixXcd reconstruct() const { return right * values.asDiagonal() * left; }
};

// Unit 2-norm; the largest-magnitude component (first one on ties) made positive real.
inline void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    v /= v.norm();
    double top = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) top = std::max(top, std::abs(v(i)));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) >= top * (1.0 - 1e-9)) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = std::abs(v(i));
            return;
        }
}

inline EigenModes eigendecompose(const Eigen::MatrixXcd& m, double cutoff,
                                 ModeOrder order = ModeOrder::oscillatory_first, bool strict = true) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
    const Eigen::Index n = m.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");

    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const Eigen::VectorXcd& ev = es.eigenvalues();
    auto osc = [&](Eigen::Index i) { return std::abs(ev(i).imag()) >= cutoff; };
    if (order == ModeOrder::oscillatory_first) {
        std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (osc(a) != osc(b)) return osc(a);
            if (osc(a)) return ev(a).imag() > ev(b).imag();
            return ev(a).real() < ev(b).real();
        });
    } else if (order == ModeOrder::ascending_imag) {
        std::stable_sort(perm.begin(), perm.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return ev(a).imag() < ev(b).imag(); });
    }

    EigenModes out;
    out.values.resize(n);
    out.right.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = ev(perm[k]);
        out.right.col(k) = es.eigenvectors().col(perm[k]);
        normalize_phase(out.right.col(k));
        out.oscillatory.push_back(osc(perm[k]));
    }
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b)
            if (std::abs(out.values(a) - out.values(b)) < degenerate_gap) out.degenerate = true;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.right);
    const auto& sv = svd.singularValues();
    out.condition = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!out.well_conditioned()) {
        if (strict)
            throw near_defective_error("eigendecompose: right-eigenvector condition number " +
                                       std::to_string(out.condition) + " exceeds 1e8");
        return out;
    }
    out.left = out.right.inverse();
    return out;
}

// ---------------------------------------------------------------------------
// Propagation

// exp(L t) applied sector by sector. The Redfield generator never couples
// different excitation sectors, so every block is propagated on its own.
class Propagator {
public:
    explicit Propagator(const LiouvilleGenerator& gen, double cutoff = units::kappa)
        : gen_(gen) {
        for (int a = 0; a < 16; ++a)
            for (int b = 0; b < 16; ++b)
                if (!(sector_of(a) == sector_of(b)) && gen.matrix(a, b) != cplx(0.0))
                    throw std::invalid_argument("Propagator: generator couples excitation sectors");
        for (const Sector& s : all_sectors()) {
            Block blk;
            blk.idx = s.indices();
            blk.matrix = gen.block(blk.idx);
            blk.modes = eigendecompose(blk.matrix, cutoff, ModeOrder::oscillatory_first, false);
            blk.use_fallback = blk.modes.degenerate || !blk.modes.well_conditioned();
            blocks_[s.id()] = std::move(blk);
        }
    }

    Vec16c apply(const Vec16c& v, double t) const {
        if (t < 0.0) throw std::invalid_argument("propagate: t must be >= 0");
        Vec16c out = Vec16c::Zero();
        for (const Block& blk : blocks_) {
            const auto n = static_cast<Eigen::Index>(blk.idx.size());
            Eigen::VectorXcd x(n);
            for (Eigen::Index i = 0; i < n; ++i) x(i) = v(blk.idx[i]);
            if (x.isZero(0.0)) continue;
            Eigen::VectorXcd y;
            if (blk.use_fallback) {
                y = (blk.matrix * t).exp() * x;
            } else {
                Eigen::VectorXcd c = blk.modes.left * x;
                for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::exp(blk.modes.values(k) * t);
                y = blk.modes.right * c;
            }
            for (Eigen::Index i = 0; i < n; ++i) out(blk.idx[i]) = y(i);
        }
        return out;
    }

    Mat4c apply(const Mat4c& rho, double t) const { return unvec(apply(vec(rho), t)); }

    const EigenModes& modes(const Sector& s) const { return blocks_[s.id()].modes; }
    const std::vector<int>& indices(const Sector& s) const { return blocks_[s.id()].idx; }
    bool uses_fallback(const Sector& s) const { return blocks_[s.id()].use_fallback; }
    const LiouvilleGenerator& generator() const { return gen_; }

private:
    struct Block {
        std::vector<int> idx;
        Eigen::MatrixXcd matrix;
        EigenModes modes;
        bool use_fallback = false;
    };
    LiouvilleGenerator gen_;
    std::array<Block, 9> blocks_;
};

inline Mat4c propagate(const LiouvilleGenerator& gen, const Mat4c& rho0, double t) {
    return Propagator(gen).apply(rho0, t);
}

}  // namespace exciton2des
