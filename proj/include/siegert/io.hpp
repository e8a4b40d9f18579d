// Model files, deterministic number formatting, run manifests.

#pragma once

#include <json.hpp>

#include <cinttypes>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "siegert/errors.hpp"
#include "siegert/model.hpp"

namespace siegert::io {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "1.0.0";

struct Model {
    std::variant<Potential1D, LatticeModel> value;
    json canonical;

    bool is_continuum() const noexcept { return std::holds_alternative<Potential1D>(value); }
    bool is_lattice() const noexcept { return std::holds_alternative<LatticeModel>(value); }

    const Potential1D& continuum() const {
        if (!is_continuum()) throw ValidationError("model: a continuum model is required for this operation");
        return std::get<Potential1D>(value);
    }
    const LatticeModel& lattice() const {
        if (!is_lattice()) throw ValidationError("model: a lattice model is required for this operation");
        return std::get<LatticeModel>(value);
    }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ValidationError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ValidationError(what + ": expected a number");
    return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw ValidationError(what + ": expected an array");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, what));
    return out;
}

}  // namespace detail

inline json to_json(const Potential1D& p) {
    json segs = json::array();
    for (const auto& s : p.segments()) segs.push_back({s.x_left, s.x_right, s.v});
    return {{"continuum", {{"segments", segs}}}};
}

inline json to_json(const LatticeModel& m) {
    return {{"lattice",
             {{"onsite", m.onsite},
              {"intra_hopping", m.intra_hopping},
              {"J", m.lead_hopping},
              {"gL", m.g_left},
              {"gR", m.g_right}}}};
}

inline Model model_from_json(const json& doc) {
    detail::reject_unknown(doc, {"continuum", "lattice"}, "model");
    if (doc.size() != 1) throw ValidationError("model: exactly one of 'continuum' or 'lattice' is required");
    if (doc.contains("continuum")) {
        const auto& c = doc.at("continuum");
        detail::reject_unknown(c, {"segments"}, "continuum");
        if (!c.contains("segments") || !c.at("segments").is_array()) {
            throw ValidationError("continuum: 'segments' array is required");
        }
        std::vector<Segment> segs;
        for (const auto& s : c.at("segments")) {
            if (!s.is_array() || s.size() != 3) throw ValidationError("continuum: each segment is [xl, xr, v]");
            segs.push_back({detail::number(s[0], "segment"), detail::number(s[1], "segment"),
                            detail::number(s[2], "segment")});
        }
        Potential1D p(std::move(segs));
        return {p, to_json(p)};
    }
    const auto& l = doc.at("lattice");
    detail::reject_unknown(l, {"onsite", "intra_hopping", "J", "gL", "gR"}, "lattice");
    if (!l.contains("onsite")) throw ValidationError("lattice: 'onsite' is required");
    LatticeModel m;
    m.onsite = detail::numbers(l.at("onsite"), "onsite");
    m.intra_hopping = l.contains("intra_hopping") ? detail::numbers(l.at("intra_hopping"), "intra_hopping")
                                                  : std::vector<double>{};
    m.lead_hopping = l.contains("J") ? detail::number(l.at("J"), "J") : 1.0;
    m.g_left = l.contains("gL") ? detail::number(l.at("gL"), "gL") : m.lead_hopping;
    m.g_right = l.contains("gR") ? detail::number(l.at("gR"), "gR") : m.lead_hopping;
    m.validate();
    return {m, to_json(m)};
}

inline Model parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model: invalid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("model: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

inline Model preset(const std::string& name) {
    if (name == "free") return {Potential1D{}, to_json(Potential1D{})};
    if (name == "square-well") {
        auto p = Potential1D::square_well(1.0, 1.0);
        return {p, to_json(p)};
    }
    if (name == "deep-well") {
        auto p = Potential1D::square_well(25.0, 1.0);
        return {p, to_json(p)};
    }
    if (name == "barrier") {
        auto p = Potential1D::square_barrier(4.0, 0.5);
        return {p, to_json(p)};
    }
    if (name == "impurity") {
        auto m = LatticeModel::single_impurity(1.0);
        return {m, to_json(m)};
    }
    if (name == "two-site") {
        auto m = LatticeModel::two_site_resonator();
        return {m, to_json(m)};
    }
    if (name == "symmetric-dot") {
        auto m = LatticeModel::symmetric_dot();
        return {m, to_json(m)};
    }
    throw ValidationError("unknown preset '" + name + "'");
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"free",     "square-well", "deep-well",    "barrier",
                                                "impurity", "two-site",    "symmetric-dot"};
    return names;
}

// FNV-1a over the canonical (key-sorted) model JSON.
inline std::string model_hash(const Model& m) {
    const std::string s = m.canonical.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

// 17 significant digits, fixed layout.
inline std::string fmt(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_pair(std::complex<double> z) { return "[" + fmt(z.real()) + ", " + fmt(z.imag()) + "]"; }

inline std::string quoted(const std::string& s) { return json(s).dump(); }

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        out_ << join(header) << '\n';
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(fmt(v));
        out_ << join(cells) << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += v[i];
        }
        return s;
    }

    std::size_t columns_;
    std::ostringstream out_;
};

struct RunManifest {
    std::string subcommand;
    std::string model_hash;
    json parameters = json::object();
    std::string tool_version = kToolVersion;
    double wall_time_s = 0.0;

    json to_json() const {
        return {{"subcommand", subcommand},
                {"model_hash", model_hash},
                {"parameters", parameters},
                {"tool_version", tool_version},
                {"wall_time_s", wall_time_s}};
    }
};

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
}

// Payload at `path`, manifest beside it at `path`.manifest.json. The payload
// never contains the wall time, so equal manifests imply equal payload bytes.
inline void write_output(const std::string& path, const std::string& payload, const RunManifest& manifest) {
    write_text(path, payload);
    write_text(path + ".manifest.json", manifest.to_json().dump(2) + "\n");
}

}  // namespace siegert::io
