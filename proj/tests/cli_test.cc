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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "qcm/error.hpp"
#include "test_util.hpp"

using namespace qcm;
using namespace qcm::cli;
using namespace qcm::testing;
using nlohmann::json;

namespace {

const char *kQubit = R"({
  "dimension": 2,
  "state": "y-plus",
  "basis_a": "computational",
  "basis_b": "fourier",
  "theta": "pi/4",
  "phi": ["pi/4", "-pi/4"]
})";

ExperimentConfig qubit(const std::string &patch = "{}") {
    json doc = json::parse(kQubit);
    doc.merge_patch(json::parse(patch));
    return parse_config(doc.dump());
}

std::string field_of(const std::string &text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e.field();
    }
    return "<none>";
}

ComplexMatrix read_complex(const json &node, int d) {
    ComplexMatrix m(d, d);
    for (int k = 0; k < d * d; ++k) {
        m(k / d, k % d) = Complex(node["re"][k].get<double>(), node["im"][k].get<double>());
    }
    return m;
}

class TempDir {
   public:
    TempDir() {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = std::filesystem::temp_directory_path() / (std::string("qcm_cli_") + info->name());
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::filesystem::remove_all(path_);
    }
    std::string file(const std::string &name, const std::string &content = "") const {
        const std::string p = (path_ / name).string();
        if (!content.empty()) {
            std::ofstream(p) << content;
        }
        return p;
    }

   private:
    std::filesystem::path path_;
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qcm");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(parse_angle, forms) {
    EXPECT_DOUBLE_EQ(parse_angle("pi/4"), kPi / 4);
    EXPECT_DOUBLE_EQ(parse_angle("-pi/4"), -kPi / 4);
    EXPECT_DOUBLE_EQ(parse_angle(" 3pi/8 "), 3 * kPi / 8);
    EXPECT_DOUBLE_EQ(parse_angle("2*pi/3"), 2 * kPi / 3);
    EXPECT_DOUBLE_EQ(parse_angle("pi"), kPi);
    EXPECT_DOUBLE_EQ(parse_angle("0.25"), 0.25);
    EXPECT_DOUBLE_EQ(parse_angle("-1e-3"), -1e-3);
    EXPECT_THROW(parse_angle("pie"), std::invalid_argument);
    EXPECT_THROW(parse_angle("pi/0"), std::invalid_argument);
    EXPECT_THROW(parse_angle("quarter"), std::invalid_argument);
    EXPECT_THROW(parse_angle(""), std::invalid_argument);
}

TEST(config, parses_all_fields) {
    const ExperimentConfig c = parse_config(R"({
      "dimension": 3,
      "state": {"re": [[1,0,0],[0,0,0],[0,0,0]], "im": [[0,0,0],[0,0,0],[0,0,0]]},
      "basis_a": {"random": 7},
      "basis_b": "fourier",
      "eigenvalues": {"a": [1, 0, -1]},
      "theta": [0.1, "pi/4"],
      "phi": 0.3,
      "shots": 1000,
      "seed": 18446744073709551615,
      "format": "csv",
      "output": "out.csv",
      "method": "fourier",
      "seeds": 12
    })");
    EXPECT_EQ(c.dimension, 3);
    ASSERT_TRUE(c.state.has_value());
    EXPECT_EQ(c.state->kind, MatrixSpec::Kind::Explicit);
    EXPECT_EQ(c.basis_a.kind, MatrixSpec::Kind::Random);
    EXPECT_EQ(c.basis_a.seed, 7u);
    EXPECT_EQ(c.basis_b.preset, "fourier");
    ASSERT_TRUE(c.eigenvalues_a.has_value());
    EXPECT_FALSE(c.eigenvalues_b.has_value());
    EXPECT_EQ(c.theta, (std::vector<double>{0.1, kPi / 4}));
    EXPECT_EQ(c.phi, (std::vector<double>{0.3}));
    EXPECT_EQ(c.shots, 1000);
    EXPECT_EQ(c.seed, 18446744073709551615ULL);
    EXPECT_EQ(c.format, OutputFormat::Csv);
    EXPECT_EQ(c.method, ReconstructionMethod::FourierScan);
    EXPECT_EQ(c.seeds, 12);
    EXPECT_EQ(build_pair(c).obs_a().eigenvalues()(2), -1.0);
}

TEST(config, round_trip) {
    const std::vector<std::string> docs = {
        kQubit,
        R"({"dimension": 3, "state": {"random": 5}, "basis_a": {"random": 1}, "basis_b": {"random": 2},
            "theta": [0.05, 0.4, "pi/4"], "shots": 100, "seed": 9, "seeds": 11, "format": "csv"})",
        R"({"dimension": 2, "state": {"re": [[0.5, 0.5], [0.5, 0.5]]}, "basis_a": "computational",
            "basis_b": {"re": [[0.6, 0.8], [0.8, -0.6]]}, "eigenvalues": {"a": [0.1, 0.2], "b": [3, -3]},
            "theta": 0.123456789012345, "phi": [0.1, 2.2, "pi"], "output": "x.json", "method": "exact"})",
        R"({"dimension": 4, "state": "computational-3", "basis_a": "fourier", "basis_b": "computational", "theta": 1})",
    };
    for (const std::string &doc : docs) {
        const ExperimentConfig first = parse_config(doc);
        const std::string text = config_to_json(first);
        const ExperimentConfig second = parse_config(text);
        EXPECT_TRUE(first == second) << text;
        EXPECT_EQ(config_to_json(second), text);
    }
    EXPECT_FALSE(qubit() == qubit(R"({"seed": 1})"));
}

TEST(config, field_precise_errors) {
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier", "theta": 2.0})"), "theta");
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier", "theta": 1, "thetta": 1})"),
              "thetta");
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier", "theta": 1, "phi": ["pi/x"]})"),
              "phi[0]");
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "sideways", "basis_b": "fourier", "theta": 1})"), "basis_a");
    EXPECT_EQ(field_of(R"({"dimension": 3, "state": {"re": [[1,0,0],[0,0],[0,0,1]]}, "basis_a": "computational",
                           "basis_b": "fourier", "theta": 1})"),
              "state.re[1]");
    EXPECT_EQ(field_of(R"({"dimension": 2, "state": "computational-2", "basis_a": "computational", "basis_b": "fourier",
                           "theta": 1})"),
              "state");
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier", "theta": 1, "shots": 0})"),
              "shots");
    EXPECT_EQ(field_of(R"({"dimension": 1, "basis_a": "computational", "basis_b": "fourier", "theta": 1})"), "dimension");
    EXPECT_EQ(field_of(R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier", "theta": 1,
                           "eigenvalues": {"c": [1, 2]}})"),
              "eigenvalues.c");
    try {
        parse_config("{\n  \"dimension\": 2,\n  \"theta\": 1,,\n}");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(config, invalid_explicit_state_is_a_config_error) {
    const ExperimentConfig c = parse_config(R"({"dimension": 2, "state": {"re": [[1, 1], [0, 0]]},
        "basis_a": "computational", "basis_b": "fourier", "theta": 1})");
    try {
        build_state(c);
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.field(), "state");
        EXPECT_NE(std::string(e.what()).find("NotHermitian"), std::string::npos);
    }
}

TEST(cmd_exact, figures_of_merit) {
    const json doc = json::parse(cmd_exact(qubit(R"({"phi": 0})")).main);
    const json &s = doc["settings"][0];
    EXPECT_NEAR(s["success_probability"].get<double>(), 0.8535533906, 1e-10);
    EXPECT_NEAR(s["dephasing"].get<double>(), 0.7071067812, 1e-10);
    EXPECT_NEAR(s["fidelity"].get<double>(), 0.8535533906, 1e-10);
    EXPECT_NEAR(s["quasi_probabilities"]["coherence"].get<double>(), 0.4142135624, 1e-10);
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(s["joint"][k].get<double>(), 0.25, 1e-12);
    }
    const ComplexMatrix kd = read_complex(doc["complex_joint"], 2);
    EXPECT_NEAR(kd(0, 0).imag(), -0.25, 1e-12);
}

TEST(cmd_exact, weak_limit_rows) {
    const ExperimentConfig c = parse_config(R"({"dimension": 3, "state": {"random": 4}, "basis_a": "computational",
        "basis_b": "fourier", "theta": 0, "phi": [0, 1.5707963267948966]})");
    const json doc = json::parse(cmd_exact(c).main);
    const DensityMatrix rho = build_state(c);
    const Observable f = fourier_basis(3);
    for (const json &s : doc["settings"]) {
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                EXPECT_NEAR(s["joint"][3 * a + b].get<double>(), rho.expectation(f.eigenvector(b)) / 3, 1e-12);
            }
        }
    }
    EXPECT_TRUE(doc["settings"][1]["quasi_probabilities"].is_null());
}

TEST(cmd_exact, csv_layout_and_precision) {
    const std::string csv = cmd_exact(qubit(R"({"format": "csv", "phi": 0})")).main;
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header,
              "theta,phi,success_probability,fidelity,dephasing,p_identity,p_measurement,p_coherence,a,b,joint,kd_re,kd_im");
    std::getline(in, row);
    EXPECT_EQ(row.rfind("0.7853981633974483,0,0.8535533905932737,", 0), 0u) << row;
}

TEST(cmd_sample, small_run_and_determinism) {
    const ExperimentConfig c = qubit(R"({"shots": 10, "seed": 3})");
    const CommandResult first = cmd_sample(c);
    const json doc = json::parse(first.main);
    for (const json &h : doc["histograms"]) {
        int64_t total = 0;
        for (const json &row : h["success_counts"]) {
            for (const json &v : row) {
                total += v.get<int64_t>();
            }
        }
        for (const json &row : h["failure_counts"]) {
            for (const json &v : row) {
                total += v.get<int64_t>();
            }
        }
        EXPECT_EQ(total, 10);
    }
    EXPECT_EQ(cmd_sample(c).main, first.main);
    EXPECT_EQ(cmd_sample(c, 2).main, first.main);
    EXPECT_NE(cmd_sample(qubit(R"({"shots": 10, "seed": 4})")).main, first.main);

    const CommandResult csv = cmd_sample(qubit(R"({"shots": 1000, "format": "csv"})"));
    EXPECT_EQ(csv.main.rfind("setting_index,theta,phi,a,b,control,count\n", 0), 0u);
    ASSERT_EQ(csv.extras.size(), 1u);
    EXPECT_EQ(csv.extras[0].suffix, "_empirical");
    EXPECT_EQ(csv.extras[0].content.rfind("setting_index,theta,phi,success_fraction,a,b,probability\n", 0), 0u);
}

TEST(cmd_sample, requires_shots) {
    try {
        cmd_sample(qubit());
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_EQ(e.field(), "shots");
        EXPECT_NE(std::string(e.what()).find("exact"), std::string::npos);
    }
}

TEST(cmd_reconstruct, exact_two_phase_round_trip) {
    const json doc = json::parse(cmd_reconstruct(qubit(), std::nullopt).main);
    EXPECT_EQ(doc["method"], "two-phase");
    EXPECT_LT(doc["trace_distance_to_truth"].get<double>(), 1e-10);
    ComplexMatrix expected(2, 2);
    expected << 0.5, Complex(0, -0.5), Complex(0, 0.5), 0.5;
    // y-plus = (|0> + i|1>)/sqrt(2)
    EXPECT_LE(max_abs(ComplexMatrix(read_complex(doc["state"], 2) - expected)), 1e-10);
}

TEST(cmd_reconstruct, fourier_matches_two_phase) {
    json phis = json::array();
    for (int k = 0; k < 64; ++k) {
        phis.push_back(2 * kPi * k / 64);
    }
    const std::string base = R"({"dimension": 3, "state": {"random": 8}, "basis_a": "computational",
        "basis_b": "fourier", "theta": 0.7})";
    json fourier = json::parse(base);
    fourier["phi"] = phis;
    fourier["method"] = "fourier-scan";
    json two = json::parse(base);
    two["phi"] = {"pi/4", "-pi/4"};
    const json f = json::parse(cmd_reconstruct(parse_config(fourier.dump()), std::nullopt).main);
    const json t = json::parse(cmd_reconstruct(parse_config(two.dump()), std::nullopt).main);
    EXPECT_EQ(f["method"], "fourier-scan");
    EXPECT_LE(max_abs(ComplexMatrix(read_complex(f["complex_joint"], 3) - read_complex(t["complex_joint"], 3))), 1e-9);
}

TEST(cmd_reconstruct, single_phase_histograms) {
    const std::string hist = cmd_sample(qubit(R"({"shots": 2000, "phi": "pi/4"})")).main;
    try {
        cmd_reconstruct(qubit(), hist);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::PhasesNotIndependent);
    }
}

TEST(cmd_reconstruct, from_histograms) {
    const std::string hist = cmd_sample(qubit(R"({"shots": 200000, "seed": 5})")).main;
    const json doc = json::parse(cmd_reconstruct(qubit(), hist).main);
    EXPECT_LT(doc["trace_distance_to_truth"].get<double>(), 0.02);
    EXPECT_GE(doc["projection_distance"].get<double>(), 0.0);
}

TEST(cmd_snr, ordering_and_validation) {
    const ExperimentConfig c = qubit(R"({"theta": [0.05, 0.4, "pi/4"], "phi": ["pi/4", "-pi/4"], "shots": 20000,
                                         "format": "csv", "seed": 2})");
    const std::string csv = cmd_snr(c).main;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "theta,rms_error,stderr");
    std::vector<double> rms;
    while (std::getline(in, line)) {
        const size_t first = line.find(',');
        rms.push_back(std::stod(line.substr(first + 1, line.find(',', first + 1) - first - 1)));
    }
    ASSERT_EQ(rms.size(), 3u);
    EXPECT_GT(rms[0], rms[1]);
    EXPECT_GT(rms[1], rms[2]);
    EXPECT_EQ(cmd_snr(c, 3).main, csv);

    auto field = [](const ExperimentConfig &bad) {
        try {
            cmd_snr(bad);
        } catch (const ConfigError &e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field(qubit(R"({"shots": 100})")), "theta");
    EXPECT_EQ(field(qubit(R"({"theta": [0.1, 0.2]})")), "shots");
    EXPECT_EQ(field(qubit(R"({"theta": [0.1, 0.2], "shots": 100, "seeds": 3})")), "seeds");
}

TEST(run, exit_codes_and_outputs) {
    TempDir dir;
    const std::string good = dir.file("good.json", kQubit);
    const std::string bad = dir.file("bad.json", R"({"dimension": 2, "basis_a": "computational", "basis_b": "fourier",
        "state": "plus", "theta": 2.0})");
    const std::string one_phase = dir.file("one.json", R"({"dimension": 2, "basis_a": "computational",
        "basis_b": "fourier", "state": "plus", "theta": 0.5, "phi": 0.5})");

    Invocation r = invoke({"exact", "--config", good, "--quiet"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.err.empty());
    EXPECT_NO_THROW(json::parse(r.out));

    r = invoke({"--config", good, "exact", "--format", "csv"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("theta,phi,", 0), 0u);
    EXPECT_NE(r.err.find("exact:"), std::string::npos);

    r = invoke({"exact", "--config", bad});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("`theta`"), std::string::npos) << r.err;

    r = invoke({"exact", "--config", dir.file("missing.json")});
    EXPECT_EQ(r.code, 1);
    r = invoke({"exact"});
    EXPECT_EQ(r.code, 1);
    r = invoke({"--config", good});
    EXPECT_EQ(r.code, 1);
    r = invoke({"sample", "--config", good});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("`shots`"), std::string::npos);

    r = invoke({"reconstruct", "--config", one_phase});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("PhasesNotIndependent"), std::string::npos) << r.err;

    const std::string sampled = dir.file("sampled.json", R"({"dimension": 2, "basis_a": "computational",
        "basis_b": "fourier", "state": "y-plus", "theta": "pi/4", "phi": 0, "shots": 50})");
    const std::string out = dir.file("hist.csv");
    r = invoke({"sample", "--config", sampled, "--format", "csv", "--out", out, "--seed", "11", "--quiet"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const std::string first = slurp(out);
    EXPECT_EQ(first.rfind("setting_index,", 0), 0u);

    r = invoke({"help", "--config", good});
    EXPECT_EQ(r.code, 1);
    r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
}

TEST(run, sample_files_are_reproducible) {
    TempDir dir;
    json doc = json::parse(kQubit);
    doc["shots"] = 1000000;
    doc["seed"] = 99;
    doc["format"] = "csv";
    const std::string cfg = dir.file("cfg.json", doc.dump());
    const std::string a = dir.file("a.csv");
    const std::string b = dir.file("b.csv");
    ASSERT_EQ(invoke({"sample", "--config", cfg, "--out", a, "--quiet"}).code, 0);
    ASSERT_EQ(invoke({"sample", "--config", cfg, "--out", b, "--quiet", "--threads", "2"}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(sibling_path(a, "_empirical")), slurp(sibling_path(b, "_empirical")));
    EXPECT_FALSE(slurp(sibling_path(a, "_empirical")).empty());
}

TEST(sibling_path, inserts_before_extension) {
    EXPECT_EQ(sibling_path("out/run.csv", "_x"), "out/run_x.csv");
    EXPECT_EQ(sibling_path("out.d/run", "_x"), "out.d/run_x");
    EXPECT_EQ(sibling_path(".hidden", "_x"), ".hidden_x");
}
