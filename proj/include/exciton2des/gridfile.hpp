// gridfile.hpp — text header + little-endian float64 payload, and CSV export
//
// Layout:
//   exciton2des-grid 1
//   dtype float64|complex128        (complex: re, im interleaved)
//   dims <n>
//   axis <name> <unit> <size>
//   <size values>                   (one line per axis)
//   attr <key> <value>              (any number)
//   end
//   <payload, row-major, last axis fastest>
#pragma once

#include "grid.hpp"

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace exciton2des {

struct GridFile {
    std::vector<Axis> axes;
    bool complex = false;
    std::vector<double> payload;  // interleaved when complex
    std::map<std::string, std::string> attrs;

    std::size_t count() const {
        std::size_t n = 1;
        for (const auto& a : axes) n *= a.size();
        return n;
    }
    Grid<double> real_grid() const {
        if (complex) throw std::runtime_error("grid file holds complex data");
        Grid<double> g(axes);
        g.data = payload;
        return g;
    }
    Grid<std::complex<double>> complex_grid() const {
        if (!complex) throw std::runtime_error("grid file holds real data");
        Grid<std::complex<double>> g(axes);
        for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = {payload[2 * i], payload[2 * i + 1]};
        return g;
    }
};

namespace detail {
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void put_le(std::ostream& os, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_le(const unsigned char* b) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline void check_token(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_of(" \t\n") != std::string::npos)
        throw std::invalid_argument(std::string("grid file: ") + what + " must be a non-empty word");
}
}  // namespace detail

template <class T>
void write_grid(std::ostream& os, const Grid<T>& g, const std::map<std::string, std::string>& attrs = {}) {
    constexpr bool cx = std::is_same_v<T, std::complex<double>>;
    static_assert(cx || std::is_same_v<T, double>, "grid files hold double or complex<double>");
    os << "exciton2des-grid 1\n" << "dtype " << (cx ? "complex128" : "float64") << "\n" << "dims " << g.axes.size() << "\n";
    for (const auto& a : g.axes) {
        detail::check_token(a.name, "axis name");
        detail::check_token(a.unit, "axis unit");
        if (!a.strictly_increasing()) throw std::invalid_argument("grid file: axis " + a.name + " not strictly increasing");
        os << "axis " << a.name << ' ' << a.unit << ' ' << a.size() << "\n";
        for (std::size_t i = 0; i < a.size(); ++i) os << (i ? " " : "") << detail::num17(a.values[i]);
        os << "\n";
    }
    for (const auto& [k, v] : attrs) {
        detail::check_token(k, "attribute key");
        if (v.find('\n') != std::string::npos) throw std::invalid_argument("grid file: attribute value has a newline");
        os << "attr " << k << ' ' << v << "\n";
    }
    os << "end\n";
    for (const auto& v : g.data) {
        if constexpr (cx) {
            detail::put_le(os, v.real());
            detail::put_le(os, v.imag());
        } else {
            detail::put_le(os, v);
        }
    }
}

template <class T>
void write_grid(const std::string& path, const Grid<T>& g, const std::map<std::string, std::string>& attrs = {}) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_grid(os, g, attrs);
    if (!os) throw std::runtime_error("write failed for " + path);
}

inline GridFile read_grid(std::istream& is) {
    auto fail = [](const std::string& m) { throw std::runtime_error("malformed grid file: " + m); };
    std::string line;
    if (!std::getline(is, line) || line != "exciton2des-grid 1") fail("bad magic line");
    GridFile f;
    std::string key, word;
    std::size_t dims = 0;
    if (!std::getline(is, line)) fail("missing dtype");
    {
        std::istringstream ls(line);
        ls >> key >> word;
        if (key != "dtype" || (word != "float64" && word != "complex128")) fail("bad dtype line");
        f.complex = word == "complex128";
    }
    if (!std::getline(is, line)) fail("missing dims");
    {
        std::istringstream ls(line);
        ls >> key >> dims;
        if (key != "dims" || !ls) fail("bad dims line");
    }
    for (std::size_t d = 0; d < dims; ++d) {
        Axis a;
        std::size_t n = 0;
        if (!std::getline(is, line)) fail("missing axis");
        std::istringstream ls(line);
        ls >> key >> a.name >> a.unit >> n;
        if (key != "axis" || !ls) fail("bad axis line");
        if (!std::getline(is, line)) fail("missing axis values");
        std::istringstream vs(line);
        a.values.resize(n);
        for (auto& v : a.values)
            if (!(vs >> v)) fail("short axis " + a.name);
        if (!a.strictly_increasing()) fail("axis " + a.name + " not strictly increasing");
        f.axes.push_back(std::move(a));
    }
    while (true) {
        if (!std::getline(is, line)) fail("missing end marker");
        if (line == "end") break;
        if (line.rfind("attr ", 0) != 0) fail("unexpected header line '" + line + "'");
        const auto sp = line.find(' ', 5);
        if (sp == std::string::npos) fail("bad attr line");
        f.attrs[line.substr(5, sp - 5)] = line.substr(sp + 1);
    }
    const std::size_t n = f.count() * (f.complex ? 2 : 1);
    std::vector<unsigned char> raw(n * 8);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(is.gcount()) != raw.size()) fail("payload shorter than header dims");
    if (is.peek() != std::char_traits<char>::eof()) fail("payload longer than header dims");
    f.payload.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.payload[i] = detail::get_le(raw.data() + 8 * i);
    return f;
}

inline GridFile read_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_grid(is);
}

// One row per grid point: axis coordinates, then value (or re, im).
template <class T>
void write_csv(std::ostream& os, const Grid<T>& g) {
    constexpr bool cx = std::is_same_v<T, std::complex<double>>;
    for (const auto& a : g.axes) os << a.name << '_' << a.unit << ',';
    os << (cx ? "re,im\n" : "value\n");
    const auto dims = g.dims();
    std::vector<std::size_t> idx(dims.size(), 0);
    for (std::size_t flat = 0; flat < g.data.size(); ++flat) {
        for (std::size_t d = 0; d < dims.size(); ++d) os << detail::num17(g.axes[d].values[idx[d]]) << ',';
        if constexpr (cx) os << detail::num17(g.data[flat].real()) << ',' << detail::num17(g.data[flat].imag()) << '\n';
        else os << detail::num17(g.data[flat]) << '\n';
        for (std::size_t d = dims.size(); d-- > 0;) {
            if (++idx[d] < dims[d]) break;
            idx[d] = 0;
        }
    }
}

template <class T>
void write_csv(const std::string& path, const Grid<T>& g) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os, g);
}

}  // namespace exciton2des
