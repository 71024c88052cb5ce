#pragma once

// JSON problem and result files.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ddp/synthesis.hpp"

namespace ddp::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* matrix_names[] = {"A", "B", "H", "C", "D_y", "G_y", "E", "D_z", "G_z"};

struct ProblemFile {
    PlantSystem sys;
    ToleranceProfile tol;
    std::optional<Compensator> compensator;  // present in result files and verify inputs
};

namespace detail {

inline Error parse_error(const std::string& what) { return Error(ErrorKind::ParseError, what); }
inline Error shape_error(const std::string& what) { return Error(ErrorKind::ShapeError, what); }

inline Matrix read_matrix(const Json& doc, const std::string& name, Index rows, Index cols)
{
    if (!doc.contains(name)) throw parse_error("missing field \"" + name + "\"");
    const Json& v = doc.at(name);
    if (!v.is_array()) throw parse_error("field \"" + name + "\" must be an array of rows");
    if (static_cast<Index>(v.size()) != rows)
        throw shape_error("matrix \"" + name + "\" has " + std::to_string(v.size()) + " rows, expected " +
                          std::to_string(rows));
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array())
            throw parse_error("field \"" + name + "\" row " + std::to_string(i) + " is not an array");
        if (static_cast<Index>(row.size()) != cols)
            throw shape_error("matrix \"" + name + "\" row " + std::to_string(i) + " has " +
                              std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        for (Index j = 0; j < cols; ++j) {
            const Json& x = row[static_cast<std::size_t>(j)];
            if (!x.is_number())
                throw parse_error("field \"" + name + "\" entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not a number");
            M(i, j) = x.get<double>();
            if (!std::isfinite(M(i, j)))
                throw parse_error("field \"" + name + "\" entry (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") is not finite");
        }
    }
    return M;
}

inline Index read_dim(const Json& dims, const char* key)
{
    if (!dims.contains(key) || !dims.at(key).is_number_integer())
        throw parse_error(std::string("dims.") + key + " must be an integer");
    const auto v = dims.at(key).get<long long>();
    if (v < 0) throw parse_error(std::string("dims.") + key + " must be non-negative");
    return static_cast<Index>(v);
}

inline std::size_t line_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

inline Json matrix_json(const Matrix& M)
{
    Json rows = Json::array();
    for (Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ProblemFile parse_problem_json(const Json& doc)
{
    if (!doc.is_object()) throw detail::parse_error("top level must be an object");
    if (!doc.contains("dims") || !doc.at("dims").is_object()) throw detail::parse_error("missing object \"dims\"");
    const Json& dims = doc.at("dims");
    const Index n = detail::read_dim(dims, "n"), m = detail::read_dim(dims, "m"), q = detail::read_dim(dims, "q"),
                p = detail::read_dim(dims, "p"), r = detail::read_dim(dims, "r");

    ProblemFile out;
    PlantSystem& s = out.sys;
    const std::string td = doc.value("time_domain", std::string("continuous"));
    if (td == "continuous") s.time_domain = RegionKind::continuous;
    else if (td == "discrete") s.time_domain = RegionKind::discrete;
    else throw detail::parse_error("time_domain must be \"continuous\" or \"discrete\", got \"" + td + "\"");

    s.A = detail::read_matrix(doc, "A", n, n);
    s.B = detail::read_matrix(doc, "B", n, m);
    s.H = detail::read_matrix(doc, "H", n, q);
    s.C = detail::read_matrix(doc, "C", p, n);
    s.D_y = detail::read_matrix(doc, "D_y", p, m);
    s.G_y = detail::read_matrix(doc, "G_y", p, q);
    s.E = detail::read_matrix(doc, "E", r, n);
    s.D_z = detail::read_matrix(doc, "D_z", r, m);
    s.G_z = detail::read_matrix(doc, "G_z", r, q);

    if (doc.contains("tolerances")) {
        const Json& t = doc.at("tolerances");
        if (!t.is_object()) throw detail::parse_error("\"tolerances\" must be an object");
        for (const auto& [key, val] : t.items()) {
            if (!val.is_number()) throw detail::parse_error("tolerances." + key + " must be a number");
            const double v = val.get<double>();
            if (key == "rank_rel") out.tol.rank_rel = v;
            else if (key == "angle") out.tol.angle = v;
            else if (key == "residual") out.tol.residual = v;
            else if (key == "ortho") out.tol.ortho = v;
            else throw detail::parse_error("unknown tolerance \"" + key + "\"");
        }
        out.tol.validate();
    }

    if (doc.contains("compensator")) {
        const Json& c = doc.at("compensator");
        if (!c.is_object()) throw detail::parse_error("\"compensator\" must be an object");
        const auto order = c.contains("A_c") && c.at("A_c").is_array() ? static_cast<Index>(c.at("A_c").size()) : 0;
        Compensator k;
        k.A_c = detail::read_matrix(c, "A_c", order, order);
        k.B_c = detail::read_matrix(c, "B_c", order, p);
        k.C_c = detail::read_matrix(c, "C_c", m, order);
        k.D_c = detail::read_matrix(c, "D_c", m, p);
        out.compensator = std::move(k);
    }
    return out;
}

inline ProblemFile parse_problem_text(const std::string& text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw detail::parse_error("malformed JSON at line " + std::to_string(detail::line_of(text, e.byte)) + ": " +
                                  e.what());
    }
    return parse_problem_json(doc);
}

inline ProblemFile parse_problem(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw detail::parse_error("cannot open \"" + path + "\"");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

inline Json plant_json(const PlantSystem& s)
{
    Json doc;
    doc["dims"] = {{"n", s.n()}, {"m", s.m()}, {"q", s.q()}, {"p", s.p()}, {"r", s.r()}};
    doc["time_domain"] = s.time_domain == RegionKind::continuous ? "continuous" : "discrete";
    const Matrix* mats[] = {&s.A, &s.B, &s.H, &s.C, &s.D_y, &s.G_y, &s.E, &s.D_z, &s.G_z};
    for (std::size_t i = 0; i < 9; ++i) doc[matrix_names[i]] = matrix_json(*mats[i]);
    return doc;
}

inline Json problem_json(const ProblemFile& f, bool with_tolerances = true)
{
    Json doc = plant_json(f.sys);
    if (with_tolerances)
        doc["tolerances"] = {{"rank_rel", f.tol.rank_rel}, {"angle", f.tol.angle}, {"residual", f.tol.residual},
                             {"ortho", f.tol.ortho}};
    return doc;
}

inline std::string serialize_problem(const ProblemFile& f) { return problem_json(f).dump(2) + "\n"; }

inline Json compensator_json(const Compensator& c)
{
    return {{"A_c", matrix_json(c.A_c)}, {"B_c", matrix_json(c.B_c)}, {"C_c", matrix_json(c.C_c)},
            {"D_c", matrix_json(c.D_c)}};
}

inline Json conditions_json(const FeasibilityReport& rep)
{
    Json out = Json::object();
    for (const auto& c : rep.conditions) {
        Json e = {{"status", to_string(c.status)}, {"residual", c.residual}};
        if (!c.note.empty()) e["note"] = c.note;
        out[c.label] = std::move(e);
    }
    return out;
}

inline Json certificate_json(const DecouplingCertificate& c)
{
    return {{"valid", c.valid()},
            {"invariant_dim", c.invariant_subspace.dim()},
            {"residual_invariance", c.residual_invariance},
            {"residual_kernel", c.residual_kernel},
            {"feedthrough_norm", c.feedthrough_norm},
            {"threshold", c.threshold}};
}

inline Json spectrum_json(const Spectrum& s)
{
    Json out = Json::array();
    for (const auto& z : s) out.push_back({z.real(), z.imag()});
    return out;
}

}  // namespace ddp::io
