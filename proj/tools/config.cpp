// Copyright 2026 The qcmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qcm/error.hpp"

namespace qcm::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kFields = {"dimension", "state", "basis_a", "basis_b", "eigenvalues", "theta", "phi",
                                       "shots",     "seed",  "format",  "output",  "method",      "seeds"};

[[noreturn]] void fail(const std::string &field, const std::string &message) {
    throw ConfigError(field, message);
}

double parse_number(std::string_view text) {
    double value = 0.0;
    const char *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double angle_value(const json &node, const std::string &field) {
    if (node.is_number()) {
        return node.get<double>();
    }
    if (node.is_string()) {
        try {
            return parse_angle(node.get<std::string>());
        } catch (const std::invalid_argument &e) {
            fail(field, e.what());
        }
    }
    fail(field, "expected an angle (number or string such as \"pi/4\")");
}

std::vector<double> angle_list(const json &node, const std::string &field) {
    std::vector<double> out;
    if (node.is_array()) {
        if (node.empty()) {
            fail(field, "must not be empty");
        }
        for (size_t i = 0; i < node.size(); ++i) {
            out.push_back(angle_value(node[i], field + "[" + std::to_string(i) + "]"));
        }
    } else {
        out.push_back(angle_value(node, field));
    }
    for (size_t i = 0; i < out.size(); ++i) {
        if (!std::isfinite(out[i])) {
            fail(field, "must be finite");
        }
    }
    return out;
}

RealMatrix real_rows(const json &node, int d, const std::string &field) {
    if (!node.is_array() || static_cast<int>(node.size()) != d) {
        fail(field, "expected " + std::to_string(d) + " rows");
    }
    RealMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const std::string row_field = field + "[" + std::to_string(r) + "]";
        if (!node[r].is_array() || static_cast<int>(node[r].size()) != d) {
            fail(row_field, "expected " + std::to_string(d) + " numbers");
        }
        for (int c = 0; c < d; ++c) {
            if (!node[r][c].is_number()) {
                fail(row_field, "expected numbers");
            }
            m(r, c) = node[r][c].get<double>();
        }
    }
    return m;
}

uint64_t seed_value(const json &node, const std::string &field) {
    if (!node.is_number_integer() || (node.is_number_integer() && !node.is_number_unsigned() && node.get<int64_t>() < 0)) {
        fail(field, "expected a nonnegative integer seed");
    }
    return node.get<uint64_t>();
}

MatrixSpec matrix_spec(const json &node, int d, const std::string &field, const std::set<std::string> &presets) {
    MatrixSpec spec;
    if (node.is_string()) {
        spec.preset = node.get<std::string>();
        bool known = presets.count(spec.preset) > 0 && spec.preset != "computational-k";
        if (!known && presets.count("computational-k") && spec.preset.rfind("computational-", 0) == 0) {
            int k = -1;
            const std::string tail = spec.preset.substr(14);
            const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
            if (ec != std::errc() || ptr != tail.data() + tail.size() || k < 0 || k >= d) {
                fail(field, "computational-k needs 0 <= k < " + std::to_string(d) + ", got '" + spec.preset + "'");
            }
            known = true;
        }
        if (!known) {
            std::string names;
            for (const auto &p : presets) {
                names += (names.empty() ? "" : ", ") + p;
            }
            fail(field, "unknown preset '" + spec.preset + "' (expected one of " + names + ")");
        }
        return spec;
    }
    if (!node.is_object()) {
        fail(field, "expected a preset name or an object");
    }
    if (node.contains("random")) {
        if (node.size() != 1) {
            fail(field, "a random spec takes only the field 'random'");
        }
        spec.kind = MatrixSpec::Kind::Random;
        spec.seed = seed_value(node["random"], field + ".random");
        return spec;
    }
    for (const auto &[key, value] : node.items()) {
        if (key != "re" && key != "im") {
            fail(field + "." + key, "unknown field");
        }
    }
    if (!node.contains("re")) {
        fail(field + ".re", "missing");
    }
    spec.kind = MatrixSpec::Kind::Explicit;
    const RealMatrix re = real_rows(node["re"], d, field + ".re");
    const RealMatrix im = node.contains("im") ? real_rows(node["im"], d, field + ".im") : RealMatrix::Zero(d, d);
    spec.matrix = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
    return spec;
}

json matrix_spec_json(const MatrixSpec &spec) {
    switch (spec.kind) {
        case MatrixSpec::Kind::Preset:
            return spec.preset;
        case MatrixSpec::Kind::Random:
            return json{{"random", spec.seed}};
        case MatrixSpec::Kind::Explicit:
            break;
    }
    json re = json::array();
    json im = json::array();
    for (Eigen::Index r = 0; r < spec.matrix.rows(); ++r) {
        json rr = json::array();
        json ir = json::array();
        for (Eigen::Index c = 0; c < spec.matrix.cols(); ++c) {
            rr.push_back(spec.matrix(r, c).real());
            ir.push_back(spec.matrix(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    return json{{"re", re}, {"im", im}};
}

RealVector eigenvalue_list(const json &node, int d, const std::string &field) {
    if (!node.is_array() || static_cast<int>(node.size()) != d) {
        fail(field, "expected " + std::to_string(d) + " eigenvalues");
    }
    RealVector v(d);
    for (int k = 0; k < d; ++k) {
        if (!node[k].is_number()) {
            fail(field, "expected numbers");
        }
        v(k) = node[k].get<double>();
    }
    return v;
}

json vector_json(const RealVector &v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Line and column (1-based) of a byte offset.
std::pair<size_t, size_t> line_column(std::string_view text, size_t offset) {
    size_t line = 1;
    size_t col = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

Observable build_basis(const MatrixSpec &spec, int d, const std::string &field) {
    try {
        switch (spec.kind) {
            case MatrixSpec::Kind::Preset:
                return spec.preset == "fourier" ? fourier_basis(d) : computational_basis(d);
            case MatrixSpec::Kind::Random:
                return random_basis(d, spec.seed);
            case MatrixSpec::Kind::Explicit:
                return Observable::make(spec.matrix);
        }
    } catch (const Error &e) {
        fail(field, e.what());
    }
    fail(field, "invalid basis");
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string &message)
    : std::runtime_error(field.empty() ? "config: " + message : "config field `" + field + "`: " + message),
      field_(std::move(field)) {
}

std::string_view format_name(OutputFormat format) {
    return format == OutputFormat::Csv ? "csv" : "json";
}

std::optional<OutputFormat> parse_format(std::string_view name) {
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    return std::nullopt;
}

double parse_angle(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) {
        throw std::invalid_argument("empty angle");
    }
    const size_t pi = s.find("pi");
    if (pi == std::string_view::npos) {
        return parse_number(s);
    }
    double sign = 1.0;
    std::string_view coef = trim(s.substr(0, pi));
    if (!coef.empty() && (coef.front() == '-' || coef.front() == '+')) {
        sign = coef.front() == '-' ? -1.0 : 1.0;
        coef = trim(coef.substr(1));
    }
    if (!coef.empty() && coef.back() == '*') {
        coef = trim(coef.substr(0, coef.size() - 1));
        if (coef.empty()) {
            throw std::invalid_argument("bad angle '" + std::string(text) + "'");
        }
    }
    const double factor = coef.empty() ? 1.0 : parse_number(coef);
    std::string_view rest = trim(s.substr(pi + 2));
    double denominator = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') {
            throw std::invalid_argument("bad angle '" + std::string(text) + "'");
        }
        denominator = parse_number(trim(rest.substr(1)));
        if (denominator == 0.0) {
            throw std::invalid_argument("zero denominator in angle '" + std::string(text) + "'");
        }
    }
    return sign * factor * std::numbers::pi / denominator;
}

bool operator==(const MatrixSpec &x, const MatrixSpec &y) {
    if (x.kind != y.kind) {
        return false;
    }
    switch (x.kind) {
        case MatrixSpec::Kind::Preset:
            return x.preset == y.preset;
        case MatrixSpec::Kind::Random:
            return x.seed == y.seed;
        case MatrixSpec::Kind::Explicit:
            return x.matrix.rows() == y.matrix.rows() && x.matrix.cols() == y.matrix.cols() && x.matrix == y.matrix;
    }
    return false;
}

namespace {

bool same_vector(const std::optional<RealVector> &x, const std::optional<RealVector> &y) {
    if (x.has_value() != y.has_value()) {
        return false;
    }
    return !x || (x->size() == y->size() && *x == *y);
}

}  // namespace

bool operator==(const ExperimentConfig &x, const ExperimentConfig &y) {
    return x.dimension == y.dimension && x.state == y.state && x.basis_a == y.basis_a && x.basis_b == y.basis_b &&
           same_vector(x.eigenvalues_a, y.eigenvalues_a) && same_vector(x.eigenvalues_b, y.eigenvalues_b) &&
           x.theta == y.theta && x.phi == y.phi && x.shots == y.shots && x.seed == y.seed && x.format == y.format &&
           x.output == y.output && x.method == y.method && x.seeds == y.seeds;
}

ExperimentConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        fail("", "line " + std::to_string(line) + ", column " + std::to_string(col) + ": invalid JSON");
    }
    if (!doc.is_object()) {
        fail("", "the document must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (!kFields.count(key)) {
            fail(key, "unknown field");
        }
    }

    ExperimentConfig config;
    if (!doc.contains("dimension")) {
        fail("dimension", "missing");
    }
    if (!doc["dimension"].is_number_integer() || doc["dimension"].get<int64_t>() < 2 ||
        doc["dimension"].get<int64_t>() > 64) {
        fail("dimension", "expected an integer in [2, 64]");
    }
    const int d = doc["dimension"].get<int>();
    config.dimension = d;

    if (doc.contains("state")) {
        config.state = matrix_spec(doc["state"], d, "state", {"computational-k", "plus", "y-plus", "maximally-mixed"});
    }
    for (const char *name : {"basis_a", "basis_b"}) {
        if (!doc.contains(name)) {
            fail(name, "missing");
        }
        MatrixSpec spec = matrix_spec(doc[name], d, name, {"computational", "fourier"});
        (std::string(name) == "basis_a" ? config.basis_a : config.basis_b) = std::move(spec);
    }
    if (doc.contains("eigenvalues")) {
        const json &ev = doc["eigenvalues"];
        if (!ev.is_object()) {
            fail("eigenvalues", "expected an object with fields 'a' and/or 'b'");
        }
        for (const auto &[key, value] : ev.items()) {
            if (key == "a") {
                config.eigenvalues_a = eigenvalue_list(value, d, "eigenvalues.a");
            } else if (key == "b") {
                config.eigenvalues_b = eigenvalue_list(value, d, "eigenvalues.b");
            } else {
                fail("eigenvalues." + key, "unknown field");
            }
        }
    }
    if (!doc.contains("theta")) {
        fail("theta", "missing");
    }
    config.theta = angle_list(doc["theta"], "theta");
    for (double t : config.theta) {
        if (t < 0.0 || t > std::numbers::pi / 2 + 1e-12) {
            fail("theta", "must lie in [0, pi/2], got " + std::to_string(t));
        }
    }
    if (doc.contains("phi")) {
        config.phi = angle_list(doc["phi"], "phi");
    }
    if (doc.contains("shots") && !doc["shots"].is_null()) {
        if (!doc["shots"].is_number_integer() || doc["shots"].get<int64_t>() < 1) {
            fail("shots", "expected a positive integer");
        }
        config.shots = doc["shots"].get<int64_t>();
    }
    if (doc.contains("seed")) {
        config.seed = seed_value(doc["seed"], "seed");
    }
    if (doc.contains("format")) {
        const auto format = doc["format"].is_string() ? parse_format(doc["format"].get<std::string>()) : std::nullopt;
        if (!format) {
            fail("format", "expected \"csv\" or \"json\"");
        }
        config.format = *format;
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string() || doc["output"].get<std::string>().empty()) {
            fail("output", "expected a nonempty path");
        }
        config.output = doc["output"].get<std::string>();
    }
    if (doc.contains("method")) {
        const auto method = doc["method"].is_string() ? parse_method(doc["method"].get<std::string>()) : std::nullopt;
        if (!method) {
            fail("method", "expected \"two-phase\", \"fourier-scan\" or \"exact\"");
        }
        config.method = *method;
    }
    if (doc.contains("seeds")) {
        if (!doc["seeds"].is_number_integer() || doc["seeds"].get<int64_t>() < 1 || doc["seeds"].get<int64_t>() > 100000) {
            fail("seeds", "expected a positive integer");
        }
        config.seeds = doc["seeds"].get<int>();
    }
    return config;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail("", "cannot read '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig &config) {
    json doc = {
        {"dimension", config.dimension},
        {"basis_a", matrix_spec_json(config.basis_a)},
        {"basis_b", matrix_spec_json(config.basis_b)},
        {"theta", config.theta},
        {"phi", config.phi},
        {"seed", config.seed},
        {"format", std::string(format_name(config.format))},
        {"method", std::string(method_name(config.method))},
        {"seeds", config.seeds},
    };
    if (config.state) {
        doc["state"] = matrix_spec_json(*config.state);
    }
    if (config.eigenvalues_a || config.eigenvalues_b) {
        json ev = json::object();
        if (config.eigenvalues_a) {
            ev["a"] = vector_json(*config.eigenvalues_a);
        }
        if (config.eigenvalues_b) {
            ev["b"] = vector_json(*config.eigenvalues_b);
        }
        doc["eigenvalues"] = ev;
    }
    if (config.shots) {
        doc["shots"] = *config.shots;
    }
    if (config.output) {
        doc["output"] = *config.output;
    }
    return doc.dump(2) + "\n";
}

DensityMatrix build_state(const ExperimentConfig &config) {
    if (!config.state) {
        fail("state", "missing");
    }
    const MatrixSpec &spec = *config.state;
    const int d = config.dimension;
    try {
        switch (spec.kind) {
            case MatrixSpec::Kind::Random:
                return random_pure_state(d, spec.seed);
            case MatrixSpec::Kind::Explicit:
                return validate_state(spec.matrix);
            case MatrixSpec::Kind::Preset:
                break;
        }
        if (spec.preset == "plus") {
            return plus_state(d);
        }
        if (spec.preset == "y-plus") {
            return y_plus_state(d);
        }
        if (spec.preset == "maximally-mixed") {
            return maximally_mixed_state(d);
        }
        return computational_state(d, std::stoi(spec.preset.substr(14)));
    } catch (const Error &e) {
        fail("state", e.what());
    }
}

ObservablePair build_pair(const ExperimentConfig &config) {
    const int d = config.dimension;
    Observable a = build_basis(config.basis_a, d, "basis_a");
    Observable b = build_basis(config.basis_b, d, "basis_b");
    try {
        if (config.eigenvalues_a) {
            a = a.with_eigenvalues(*config.eigenvalues_a);
        }
        if (config.eigenvalues_b) {
            b = b.with_eigenvalues(*config.eigenvalues_b);
        }
    } catch (const Error &e) {
        fail("eigenvalues", e.what());
    }
    return ObservablePair(std::move(a), std::move(b));
}

}  // namespace qcm::cli
