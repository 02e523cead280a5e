#ifndef HARDY_IO_HPP
#define HARDY_IO_HPP

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "inner.hpp"
#include "nearly.hpp"

namespace hardy::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg)
{
    throw ParseError(path + ": " + msg);
}

inline const json& field(const json& j, const char* key, const std::string& path)
{
    if (!j.is_object())
        fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        fail(path, std::string("missing field \"") + key + "\"");
    return *it;
}

inline double real_at(const json& j, const std::string& path)
{
    if (!j.is_number())
        fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        fail(path, "non-finite number");
    return v;
}

inline int int_at(const json& j, const std::string& path)
{
    if (!j.is_number_integer())
        fail(path, "expected an integer");
    return j.get<int>();
}

/// [re, im] or a bare real.
inline cplx complex_at(const json& j, const std::string& path)
{
    if (j.is_number())
        return {real_at(j, path), 0.0};
    if (!j.is_array() || j.size() != 2)
        fail(path, "expected [re, im]");
    return {real_at(j[0], path + "[0]"), real_at(j[1], path + "[1]")};
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

} // namespace detail

/// Parses JSON text; syntax errors carry the line and column.
inline json parse_text(const std::string& text, const std::string& source = "<input>")
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points one past the end on truncated input.
        const std::size_t pos = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        int line = 1;
        std::size_t line_start = 0;
        for (std::size_t i = 0; i < pos; ++i)
            if (text[i] == '\n') {
                ++line;
                line_start = i + 1;
            }
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(pos - line_start + 1)
                         + ": malformed JSON (" + e.what() + ")");
    } catch (const json::out_of_range& e) {
        throw ParseError(source + ": non-finite number (" + e.what() + ")");
    }
}

inline json load_file(const std::string& filename)
{
    std::ifstream in(filename);
    if (!in)
        throw ParseError(filename + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), filename);
}

/// {"m": int, "coeffs": [[[re,im] per component] per degree]}
inline CoeffFn function_from_json(const json& j, const std::string& path = "$")
{
    const int m = detail::int_at(detail::field(j, "m", path), path + ".m");
    if (m <= 0)
        detail::fail(path + ".m", "dimension must be positive");
    const json& c = detail::field(j, "coeffs", path);
    if (!c.is_array() || c.empty())
        detail::fail(path + ".coeffs", "expected a non-empty array");
    CMat a(m, static_cast<Eigen::Index>(c.size()));
    for (std::size_t n = 0; n < c.size(); ++n) {
        const std::string pn = path + ".coeffs[" + std::to_string(n) + "]";
        if (!c[n].is_array() || static_cast<int>(c[n].size()) != m)
            detail::fail(pn, "expected " + std::to_string(m) + " components");
        for (int i = 0; i < m; ++i)
            a(i, static_cast<Eigen::Index>(n)) = detail::complex_at(c[n][static_cast<std::size_t>(i)],
                                                                     pn + "[" + std::to_string(i) + "]");
    }
    return CoeffFn(std::move(a));
}

inline json function_to_json(const CoeffFn& f)
{
    json coeffs = json::array();
    for (int n = 0; n <= f.deg(); ++n) {
        json col = json::array();
        for (int i = 0; i < f.dim(); ++i)
            col.push_back(detail::complex_to_json(f.coeffs()(i, n)));
        coeffs.push_back(std::move(col));
    }
    return {{"m", f.dim()}, {"coeffs", std::move(coeffs)}};
}

inline CoeffFn parse_function_spec(const std::string& text) { return function_from_json(parse_text(text)); }

namespace detail {

inline MatSymbol scalar_symbol_from_json(const json& j, int deg, const std::string& path);

inline MatSymbol symbol_from_json(const json& j, int deg, const std::string& path)
{
    const json& kind_j = field(j, "kind", path);
    if (!kind_j.is_string())
        fail(path + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    if (j.contains("deg"))
        deg = int_at(j["deg"], path + ".deg");

    if (kind == "diag") {
        const json& e = field(j, "entries", path);
        if (!e.is_array() || e.empty())
            fail(path + ".entries", "expected a non-empty array");
        std::vector<MatSymbol> entries;
        for (std::size_t i = 0; i < e.size(); ++i)
            entries.push_back(scalar_symbol_from_json(e[i], deg, path + ".entries[" + std::to_string(i) + "]"));
        int d = deg;
        for (const auto& s : entries)
            d = std::max(d, s.deg());
        bool inner = true;
        for (const auto& s : entries)
            inner = inner && s.claimed_inner();
        if (inner)
            return diag_inner(entries, d);
        const auto m = static_cast<Eigen::Index>(entries.size());
        std::vector<CMat> mats(static_cast<std::size_t>(d + 1), CMat::Zero(m, m));
        double tail = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto& s = entries[static_cast<std::size_t>(i)];
            for (int k = 0; k <= s.deg(); ++k)
                mats[static_cast<std::size_t>(k)](i, i) = s.at(k)(0, 0);
            tail = std::max(tail, s.tail_bound());
        }
        return MatSymbol(static_cast<int>(m), static_cast<int>(m), std::move(mats), tail, false);
    }
    if (kind == "matrix") {
        const json& rows = field(j, "rows", path);
        if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty())
            fail(path + ".rows", "expected a non-empty array of rows");
        const std::size_t cols = rows[0].size();
        std::vector<std::vector<MatSymbol>> cells;
        int d = 0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::string pr = path + ".rows[" + std::to_string(r) + "]";
            if (!rows[r].is_array() || rows[r].size() != cols)
                fail(pr, "ragged row, expected " + std::to_string(cols) + " entries");
            cells.emplace_back();
            for (std::size_t c = 0; c < cols; ++c) {
                cells.back().push_back(scalar_symbol_from_json(rows[r][c], deg, pr + "[" + std::to_string(c) + "]"));
                d = std::max(d, cells.back().back().deg());
            }
        }
        std::vector<CMat> mats(static_cast<std::size_t>(d + 1),
                               CMat::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols)));
        double tail = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const auto& s = cells[r][c];
                for (int k = 0; k <= s.deg(); ++k)
                    mats[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        s.at(k)(0, 0);
                tail += s.tail_bound(); // operator norm <= sum of entry norms
            }
        const bool claimed = j.value("inner", false);
        MatSymbol t(static_cast<int>(rows.size()), static_cast<int>(cols), std::move(mats), tail, claimed);
        if (claimed) {
            const double dev = check_inner(t, 4 * (t.deg() + 1) + 64);
            if (dev > std::max(1e-8, 3.0 * tail))
                throw DomainError(path + ": matrix symbol marked inner deviates from unitary by " + std::to_string(dev));
        }
        return t;
    }
    return scalar_symbol_from_json(j, deg, path);
}

inline MatSymbol scalar_symbol_from_json(const json& j, int deg, const std::string& path)
{
    const json& kind_j = field(j, "kind", path);
    if (!kind_j.is_string())
        fail(path + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    if (j.contains("deg"))
        deg = int_at(j["deg"], path + ".deg");

    if (kind == "monomial") {
        const int k = int_at(field(j, "k", path), path + ".k");
        if (k < 0)
            fail(path + ".k", "negative exponent");
        return monomial_inner(k, std::max(deg, k));
    }
    if (kind == "blaschke") {
        BlaschkeSpec spec;
        const json& zeros = field(j, "zeros", path);
        if (!zeros.is_array())
            fail(path + ".zeros", "expected an array");
        for (std::size_t i = 0; i < zeros.size(); ++i)
            spec.zeros.push_back(complex_at(zeros[i], path + ".zeros[" + std::to_string(i) + "]"));
        if (j.contains("rotation"))
            spec.rotation = complex_at(j["rotation"], path + ".rotation");
        if (deg < 0)
            fail(path, "blaschke symbol needs a truncation degree \"deg\"");
        return blaschke_scalar(spec, deg);
    }
    if (kind == "poly") {
        const json& c = field(j, "coeffs", path);
        if (!c.is_array() || c.empty())
            fail(path + ".coeffs", "expected a non-empty array");
        CMat a(1, static_cast<Eigen::Index>(c.size()));
        for (std::size_t n = 0; n < c.size(); ++n)
            a(0, static_cast<Eigen::Index>(n)) = complex_at(c[n], path + ".coeffs[" + std::to_string(n) + "]");
        const bool claimed = j.value("inner", false);
        MatSymbol t = scalar_symbol(CoeffFn(std::move(a)), 0.0, claimed);
        if (claimed && check_inner(t, 4 * (t.deg() + 1) + 64) > 1e-8)
            throw DomainError(path + ": polynomial marked inner is not unimodular on the circle");
        return t;
    }
    if (kind == "diag" || kind == "matrix")
        fail(path, "expected a scalar entry, got \"" + kind + "\"");
    fail(path + ".kind", "unknown symbol kind \"" + kind + "\"");
}

} // namespace detail

/// Symbol spec: kinds monomial, blaschke, poly, diag, matrix; optional top-level "deg".
inline MatSymbol symbol_from_json(const json& j, const std::string& path = "$")
{
    return detail::symbol_from_json(j, -1, path);
}

inline MatSymbol parse_symbol_spec(const std::string& text) { return symbol_from_json(parse_text(text)); }

inline json symbol_to_json(const MatSymbol& t)
{
    json rows = json::array();
    for (int k = 0; k <= t.deg(); ++k) {
        json mat = json::array();
        for (int r = 0; r < t.m_out(); ++r) {
            json row = json::array();
            for (int c = 0; c < t.m_in(); ++c)
                row.push_back(detail::complex_to_json(t.at(k)(r, c)));
            mat.push_back(std::move(row));
        }
        rows.push_back(std::move(mat));
    }
    return {{"m_out", t.m_out()},          {"m_in", t.m_in()},
            {"deg", t.deg()},              {"tail_bound", t.tail_bound()},
            {"inner", t.claimed_inner()}, {"coeffs", std::move(rows)}};
}

inline std::vector<CoeffFn> functions_from_json(const json& j, const std::string& path)
{
    if (!j.is_array())
        detail::fail(path, "expected an array of functions");
    std::vector<CoeffFn> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(function_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

/**
 * {"m", "ambient_deg", "basis": [function, ...]} spans a subspace; alternatively
 * {"model": symbol} or {"beurling": symbol} with "ambient_deg" builds one.
 */
inline Subspace space_from_json(const json& j, double tol = kDefaultTol, const std::string& path = "$")
{
    const int n = detail::int_at(detail::field(j, "ambient_deg", path), path + ".ambient_deg");
    if (n < 0)
        detail::fail(path + ".ambient_deg", "must be non-negative");
    if (j.contains("model"))
        return model_space(symbol_from_json(j["model"], path + ".model"), n, tol);
    if (j.contains("beurling"))
        return beurling_space(symbol_from_json(j["beurling"], path + ".beurling"), n, tol);
    const int m = detail::int_at(detail::field(j, "m", path), path + ".m");
    const std::vector<CoeffFn> basis = functions_from_json(detail::field(j, "basis", path), path + ".basis");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].dim() != m)
            detail::fail(path + ".basis[" + std::to_string(i) + "]", "dimension differs from m");
        if (basis[i].deg() > n)
            detail::fail(path + ".basis[" + std::to_string(i) + "]", "degree exceeds ambient_deg");
    }
    return from_spanning(m, basis, n, tol);
}

inline json space_to_json(const Subspace& s)
{
    json basis = json::array();
    for (int i = 0; i < s.dim(); ++i)
        basis.push_back(function_to_json(s.basis_fn(i)));
    return {{"m", s.dim_m()}, {"ambient_deg", s.ambient_deg()}, {"dim", s.dim()}, {"basis", std::move(basis)}};
}

inline json certificate_to_json(const DefectCertificate& c)
{
    json basis = json::array();
    for (const auto& f : c.defect_basis)
        basis.push_back(function_to_json(f));
    return {{"op", to_string(c.op)},
            {"mode", to_string(c.mode)},
            {"defect_dim", c.defect_dim},
            {"singular_values", c.singular_values},
            {"max_residual", c.max_residual},
            {"tol", c.tol},
            {"defect_basis", std::move(basis)}};
}

inline json decomp_to_json(const DecompResult& d)
{
    json kj = json::array();
    for (const auto& k : d.kj)
        kj.push_back(function_to_json(k));
    json out = {{"iterations", d.iterations},
                {"converged", d.converged},
                {"norm_gap", d.norm_gap},
                {"max_step_residual", d.max_step_residual},
                {"gk_norms", d.gk_norms},
                {"kj", std::move(kj)}};
    out["K0"] = d.K0 ? function_to_json(*d.K0) : json(nullptr);
    return out;
}

} // namespace hardy::io

#endif // HARDY_IO_HPP
