#include "ontolab/documents.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace ontolab {

using nlohmann::json;

DocumentError::DocumentError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line ? message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"
                              : message),
      line_(line), column_(column) {}

json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        // e.byte is the 1-based offset of the offending character.
        std::size_t line = 1, column = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw DocumentError("malformed document: " + what, line, column);
    }
}

CVector complex_vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw DocumentError(what + ": vector must be an array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& c = j[i];
        if (c.is_number()) {
            v(static_cast<Eigen::Index>(i)) = c.get<double>();
        } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
            v(static_cast<Eigen::Index>(i)) = Complex(c[0].get<double>(), c[1].get<double>());
        } else {
            throw DocumentError(what + ": component " + std::to_string(i) + " must be a number or an [re, im] pair");
        }
    }
    return v;
}

json to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
    return out;
}

namespace {

NamedStates parse_states(const json& list, std::size_t dim, const std::string& kind) {
    if (!list.is_array()) throw DocumentError("'" + kind + "' must be an array");
    NamedStates out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& entry = list[i];
        std::string name = kind + "[" + std::to_string(i) + "]";
        const json* vec = &entry;
        if (entry.is_object()) {
            if (entry.contains("name")) {
                if (!entry["name"].is_string()) throw DocumentError(name + ": name must be a string");
                name = entry["name"].get<std::string>();
            }
            if (!entry.contains("vector")) throw DocumentError(kind + " '" + name + "' has no vector");
            vec = &entry["vector"];
        }
        if (!seen.insert(name).second) throw DocumentError("duplicate " + kind + " name '" + name + "'");
        CVector v = complex_vector_from_json(*vec, kind + " '" + name + "'");
        if (static_cast<std::size_t>(v.size()) != dim) {
            throw DocumentError(kind + " '" + name + "' has " + std::to_string(v.size()) + " components, expected dim " +
                                std::to_string(dim));
        }
        try {
            PureState s(std::move(v));
            out.input_norms.push_back(s.input_norm());
            out.states.push_back(std::move(s));
        } catch (const std::invalid_argument& e) {
            throw DocumentError(kind + " '" + name + "': " + e.what());
        }
        out.names.push_back(std::move(name));
    }
    return out;
}

std::size_t require_dim(const json& doc) {
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 2) {
        throw DocumentError("document needs an integer 'dim' >= 2");
    }
    return doc["dim"].get<std::size_t>();
}

} // namespace

ProblemDocument parse_problem(std::string_view text) {
    ProblemDocument doc;
    doc.raw = parse_json(text);
    if (!doc.raw.is_object()) throw DocumentError("document must be a JSON object");
    doc.dim = require_dim(doc.raw);
    if (doc.raw.contains("states")) doc.states = parse_states(doc.raw["states"], doc.dim, "state");
    if (doc.raw.contains("effects")) {
        doc.effects = parse_states(doc.raw["effects"], doc.dim, "effect");
        doc.effects_given = true;
    } else {
        doc.effects = doc.states;
    }
    if (doc.raw.contains("options")) {
        if (!doc.raw["options"].is_object()) throw DocumentError("'options' must be an object");
        doc.options = doc.raw["options"];
    }
    return doc;
}

RaySet ray_set_from_json(const json& doc) {
    if (!doc.is_object()) throw DocumentError("ray set document must be a JSON object");
    RaySet rs;
    rs.dim = require_dim(doc);
    if (!doc.contains("rays") || !doc["rays"].is_array()) throw DocumentError("ray set needs a 'rays' array");
    if (!doc.contains("bases") || !doc["bases"].is_array()) throw DocumentError("ray set needs a 'bases' array");
    const bool normalize = doc.value("normalize", true);
    for (std::size_t r = 0; r < doc["rays"].size(); ++r) {
        CVector v = complex_vector_from_json(doc["rays"][r], "ray " + std::to_string(r));
        if (normalize) {
            const double n = v.norm();
            if (n < kMinNorm) throw DocumentError("ray " + std::to_string(r) + " is degenerate");
            v /= n;
        }
        rs.rays.push_back(std::move(v));
    }
    for (const json& b : doc["bases"]) {
        if (!b.is_array()) throw DocumentError("each basis must be an array of ray indices");
        std::vector<std::size_t> group;
        for (const json& i : b) {
            if (!i.is_number_unsigned() && !(i.is_number_integer() && i.get<long long>() >= 0)) {
                throw DocumentError("basis entries must be nonnegative ray indices");
            }
            group.push_back(i.get<std::size_t>());
        }
        rs.bases.push_back(std::move(group));
    }
    return rs;
}

RaySet parse_ray_set(std::string_view text) { return ray_set_from_json(parse_json(text)); }

nlohmann::ordered_json model_table_to_json(const ModelTable& t) {
    nlohmann::ordered_json out;
    out["dim"] = t.dim;
    out["kind"] = t.kind;
    out["ontic"] = t.labels;
    auto& states = out["states"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        states.push_back({{"name", t.state_names[i]}, {"vector", to_json(t.states[i].amplitudes())}, {"weights", t.weights[i]}});
    }
    auto& effects = out["effects"] = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < t.effects.size(); ++j) {
        effects.push_back(
            {{"name", t.effect_names[j]}, {"vector", to_json(t.effects[j].amplitudes())}, {"responses", t.responses[j]}});
    }
    return out;
}

ModelTable model_table_from_json(const json& doc) {
    if (!doc.is_object()) throw DocumentError("model table must be a JSON object");
    ModelTable t;
    t.dim = require_dim(doc);
    t.kind = doc.value("kind", "table");
    if (!doc.contains("ontic") || !doc["ontic"].is_array()) throw DocumentError("model table needs an 'ontic' label array");
    t.labels = doc["ontic"].get<std::vector<std::string>>();
    auto read = [&](const char* key, const char* vec_key, std::vector<std::string>& names, std::vector<PureState>& states,
                    std::vector<std::vector<double>>& vectors) {
        if (!doc.contains(key) || !doc[key].is_array()) throw DocumentError(std::string("model table needs '") + key + "'");
        NamedStates parsed = parse_states(doc[key], t.dim, key);
        names = parsed.names;
        states = parsed.states;
        for (std::size_t i = 0; i < doc[key].size(); ++i) {
            const json& entry = doc[key][i];
            if (!entry.is_object() || !entry.contains(vec_key) || !entry[vec_key].is_array()) {
                throw DocumentError(std::string(key) + " '" + names[i] + "' has no '" + vec_key + "' array");
            }
            auto v = entry[vec_key].get<std::vector<double>>();
            if (v.size() != t.labels.size()) {
                throw DocumentError(std::string(key) + " '" + names[i] + "': " + vec_key + " length " +
                                    std::to_string(v.size()) + " != ontic size " + std::to_string(t.labels.size()));
            }
            vectors.push_back(std::move(v));
        }
    };
    read("states", "weights", t.state_names, t.states, t.weights);
    read("effects", "responses", t.effect_names, t.effects, t.responses);
    return t;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace ontolab
