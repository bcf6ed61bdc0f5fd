#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ontolab/kochen_specker.hpp"
#include "ontolab/onto.hpp"
#include "ontolab/qcore.hpp"

namespace ontolab {

/// Malformed or inconsistent input document. line/column are 1-based and
/// zero when the problem is not tied to a text position.
class DocumentError : public std::runtime_error {
public:
    DocumentError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_, column_;
};

struct NamedStates {
    std::vector<std::string> names;
    std::vector<PureState> states;
    std::vector<double> input_norms; // norms before normalization
};

/// {"dim": d, "states": [{"name": .., "vector": [..]}], "effects": [..],
///  "options": {..}}. Vector components are numbers or [re, im] pairs.
/// Effects default to the states when absent.
struct ProblemDocument {
    std::size_t dim = 0;
    NamedStates states;
    NamedStates effects;
    bool effects_given = false;
    nlohmann::json options = nlohmann::json::object();
    nlohmann::json raw;
};

ProblemDocument parse_problem(std::string_view text);

/// Parses JSON text, mapping syntax errors to DocumentError with the line
/// and column of the failure.
nlohmann::json parse_json(std::string_view text);

/// {"dim": d, "rays": [[..], ..], "bases": [[i, ..], ..]}; rays are
/// normalized on load unless "normalize": false.
RaySet parse_ray_set(std::string_view text);
RaySet ray_set_from_json(const nlohmann::json& doc);

/// Complex vector as an array of [re, im] pairs.
nlohmann::json to_json(const CVector& v);
CVector complex_vector_from_json(const nlohmann::json& j, const std::string& what);

/// Model export/import: ontic labels, named states with their weight
/// vectors, named effects with their response vectors.
nlohmann::ordered_json model_table_to_json(const ModelTable& table);
ModelTable model_table_from_json(const nlohmann::json& doc);

/// 17 significant digits.
std::string format_double(double v);

} // namespace ontolab
