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

#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "qcm/error.hpp"
#include "qcm/format.hpp"
#include "qcm/measurement.hpp"
#include "qcm/sampler.hpp"
#include "qcm/statistics.hpp"

namespace qcm::cli {

namespace {

using nlohmann::json;

json complex_flat(const ComplexMatrix &m) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    }
    return {{"re", re}, {"im", im}};
}

json real_flat(const RealMatrix &m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back(m(r, c));
        }
    }
    return out;
}

std::string dump(const json &doc) {
    return doc.dump(2) + "\n";
}

std::vector<ControlSetting> settings_of(const ExperimentConfig &config) {
    std::vector<ControlSetting> out;
    for (double theta : config.theta) {
        for (double phi : config.phi) {
            out.push_back(ControlSetting::make(config.dimension, theta, phi));
        }
    }
    return out;
}

std::optional<QuasiProbTriple> triple_if_defined(const ControlSetting &setting) {
    if (std::abs(std::cos(setting.phi())) <= kPhaseSingularityBound) {
        return std::nullopt;
    }
    return decompose(setting);
}

double single_theta(const ExperimentConfig &config, const char *command) {
    if (config.theta.size() != 1) {
        throw ConfigError("theta", std::string(command) + " takes a single theta");
    }
    return config.theta.front();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace

std::string sibling_path(const std::string &path, const std::string &suffix) {
    const size_t slash = path.find_last_of('/');
    const size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash) || dot == slash + 1) {
        return path + suffix;
    }
    return path.substr(0, dot) + suffix + path.substr(dot);
}

CommandResult cmd_exact(const ExperimentConfig &config) {
    const DensityMatrix state = build_state(config);
    const ObservablePair pair = build_pair(config);
    const int d = config.dimension;
    const ComplexMatrix kd = complex_joint_probability(state, pair).values;
    const std::vector<ControlSetting> settings = settings_of(config);

    CommandResult result;
    if (config.format == OutputFormat::Json) {
        json rows = json::array();
        for (const ControlSetting &s : settings) {
            const JointOutcomeTable table = exact_joint_probability(state, pair, s);
            json row = {{"theta", s.theta()},
                        {"phi", s.phi()},
                        {"success_probability", success_probability(s)},
                        {"fidelity", measurement_fidelity(s)},
                        {"dephasing", dephasing_factor(s)},
                        {"joint", real_flat(table.probs())}};
            const auto triple = triple_if_defined(s);
            row["quasi_probabilities"] =
                triple ? json{{"identity", triple->p_identity}, {"measurement", triple->p_measurement}, {"coherence", triple->p_coherence}}
                       : json(nullptr);
            rows.push_back(std::move(row));
        }
        result.main = dump({{"d", d}, {"complex_joint", complex_flat(kd)}, {"settings", rows}});
    } else {
        std::ostringstream csv;
        csv << "theta,phi,success_probability,fidelity,dephasing,p_identity,p_measurement,p_coherence,a,b,joint,kd_re,kd_im\n";
        for (const ControlSetting &s : settings) {
            const JointOutcomeTable table = exact_joint_probability(state, pair, s);
            const auto triple = triple_if_defined(s);
            std::string prefix = format_double(s.theta()) + "," + format_double(s.phi()) + "," +
                                 format_double(success_probability(s)) + "," + format_double(measurement_fidelity(s)) + "," +
                                 format_double(dephasing_factor(s)) + ",";
            prefix += triple ? format_double(triple->p_identity) + "," + format_double(triple->p_measurement) + "," +
                                   format_double(triple->p_coherence) + ","
                             : std::string(",,,");
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    csv << prefix << a << ',' << b << ',' << format_double(table(a, b)) << ','
                        << format_double(kd(a, b).real()) << ',' << format_double(kd(a, b).imag()) << '\n';
                }
            }
        }
        result.main = csv.str();
    }
    result.summary = "exact: " + std::to_string(settings.size()) + " setting(s), d=" + std::to_string(d);
    return result;
}

CommandResult cmd_sample(const ExperimentConfig &config, int threads) {
    if (!config.shots) {
        throw ConfigError("shots", "sample needs a shot count; use `exact` for infinite statistics");
    }
    const ExperimentPlan plan{build_state(config), build_pair(config), settings_of(config), *config.shots, config.seed};
    const std::vector<CountHistogram> hists = run_experiment(plan, threads);
    const int d = config.dimension;

    CommandResult result;
    if (config.format == OutputFormat::Json) {
        json empirical = json::array();
        for (size_t i = 0; i < hists.size(); ++i) {
            json row = {{"setting_index", i},
                        {"theta", hists[i].setting.theta()},
                        {"phi", hists[i].setting.phi()},
                        {"success_fraction", static_cast<double>(hists[i].success_total()) /
                                                 static_cast<double>(hists[i].total_shots)}};
            row["joint"] = hists[i].success_total() > 0 ? real_flat(empirical_joint(hists[i]).probs()) : json(nullptr);
            empirical.push_back(std::move(row));
        }
        result.main = dump({{"histograms", json::parse(histograms_to_json(hists))}, {"empirical", empirical}});
    } else {
        result.main = histograms_to_csv(hists);
        std::ostringstream csv;
        csv << "setting_index,theta,phi,success_fraction,a,b,probability\n";
        for (size_t i = 0; i < hists.size(); ++i) {
            if (hists[i].success_total() == 0) {
                continue;
            }
            const JointOutcomeTable t = empirical_joint(hists[i]);
            const std::string prefix = std::to_string(i) + "," + format_double(hists[i].setting.theta()) + "," +
                                       format_double(hists[i].setting.phi()) + "," + format_double(t.success_prob()) + ",";
            for (int a = 0; a < d; ++a) {
                for (int b = 0; b < d; ++b) {
                    csv << prefix << a << ',' << b << ',' << format_double(t(a, b)) << '\n';
                }
            }
        }
        result.extras.push_back({"_empirical", csv.str()});
    }
    result.summary = "sample: " + std::to_string(hists.size()) + " setting(s) x " + std::to_string(*config.shots) + " shots";
    return result;
}

CommandResult cmd_reconstruct(const ExperimentConfig &config, const std::optional<std::string> &histogram_json,
                              int threads) {
    if (config.format != OutputFormat::Json) {
        throw ConfigError("format", "reconstruct writes a JSON report");
    }
    const ObservablePair pair = build_pair(config);
    std::optional<DensityMatrix> truth;
    if (config.state) {
        truth = build_state(config);
    }

    std::vector<JointOutcomeTable> tables;
    if (histogram_json) {
        json doc;
        try {
            doc = json::parse(*histogram_json);
        } catch (const json::parse_error &e) {
            throw ConfigError("", std::string("histogram file is not valid JSON: ") + e.what());
        }
        const json &array = doc.is_object() && doc.contains("histograms") ? doc["histograms"] : doc;
        for (const CountHistogram &h : histograms_from_json(array.dump())) {
            if (h.setting.d() != config.dimension) {
                throw ConfigError("dimension", "histograms have d=" + std::to_string(h.setting.d()));
            }
            tables.push_back(empirical_joint(h));
        }
    } else {
        if (!truth) {
            throw ConfigError("state", "missing (required unless --histograms is given)");
        }
        const double theta = single_theta(config, "reconstruct");
        std::vector<ControlSetting> settings;
        for (double phi : config.phi) {
            settings.push_back(ControlSetting::make(config.dimension, theta, phi));
        }
        if (config.shots) {
            for (const CountHistogram &h :
                 run_experiment(ExperimentPlan{*truth, pair, settings, *config.shots, config.seed}, threads)) {
                tables.push_back(empirical_joint(h));
            }
        } else {
            for (const ControlSetting &s : settings) {
                tables.push_back(exact_joint_probability(*truth, pair, s));
            }
        }
    }

    ComplexJointDistribution dist{ComplexMatrix(), pair};
    switch (config.method) {
        case ReconstructionMethod::TwoPhase:
            // A single phase leaves the system underdetermined; pairing the
            // table with itself surfaces PhasesNotIndependent.
            dist = reconstruct_two_phase(tables.front(), tables.size() > 1 ? tables[1] : tables.front(), pair);
            break;
        case ReconstructionMethod::FourierScan:
            dist = fourier_extract(tables, pair);
            break;
        case ReconstructionMethod::Exact:
            if (!truth) {
                throw ConfigError("method", "exact needs the state in the config");
            }
            dist = complex_joint_probability(*truth, pair);
            break;
    }
    const ReconstructionReport report = make_report(dist, config.method, truth);
    CommandResult result;
    result.main = report_to_json(report);
    result.summary = std::string("reconstruct: ") + std::string(method_name(config.method)) + " from " +
                     std::to_string(tables.size()) + " table(s), max residual " + format_double(report.max_residual);
    if (report.trace_distance_to_truth) {
        result.summary += ", trace distance to truth " + format_double(*report.trace_distance_to_truth);
    }
    return result;
}

CommandResult cmd_snr(const ExperimentConfig &config, int threads) {
    if (config.theta.size() < 2) {
        throw ConfigError("theta", "snr needs at least two theta values");
    }
    if (!config.shots) {
        throw ConfigError("shots", "snr requires finite shots");
    }
    if (config.seeds < 10) {
        throw ConfigError("seeds", "snr needs at least 10 seeds");
    }
    SnrRequest request{build_state(config), build_pair(config), config.theta, *config.shots};
    request.seeds = config.seeds;
    request.base_seed = config.seed;
    request.threads = threads;
    if (config.phi.size() == 2) {
        request.phases = {config.phi[0], config.phi[1]};
    } else if (config.phi.size() > 2) {
        throw ConfigError("phi", "snr uses exactly two phases (default +-pi/4)");
    }
    const std::vector<SnrRow> rows = snr_summary(request);

    CommandResult result;
    if (config.format == OutputFormat::Csv) {
        result.main = snr_to_csv(rows);
    } else {
        json doc = json::array();
        for (const SnrRow &row : rows) {
            doc.push_back({{"theta", row.theta}, {"rms_error", row.rms_error}, {"stderr", row.standard_error}});
        }
        result.main = dump(doc);
    }
    result.summary = "snr: " + std::to_string(rows.size()) + " strengths, " + std::to_string(config.seeds) + " seeds";
    return result;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum-controlled sequential measurement simulator and reconstruction toolkit", "qcm"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    std::optional<uint64_t> seed;
    bool quiet = false;
    int threads = 1;
    std::string histograms;
    app.add_option("--config", config_path, "Experiment config (JSON)")->required();
    app.add_option("--out", out_path, "Output path (default: config `output`, else stdout)");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "Override the config seed");
    app.add_flag("--quiet", quiet, "Suppress the summary line on stderr");
    app.add_option("--threads", threads, "Worker threads for sampling")->check(CLI::Range(1, 256));

    CLI::App *exact = app.add_subcommand("exact", "Closed-form statistics");
    CLI::App *sample = app.add_subcommand("sample", "Monte Carlo histograms");
    CLI::App *reconstruct = app.add_subcommand("reconstruct", "Complex joint distribution and state reconstruction");
    reconstruct->add_option("--histograms", histograms, "Histogram JSON written by `sample`");
    CLI::App *snr = app.add_subcommand("snr", "Reconstruction error versus measurement strength");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    ExperimentConfig config;
    std::optional<std::string> histogram_text;
    try {
        config = load_config(config_path);
        if (!format.empty()) {
            config.format = *parse_format(format);
        }
        if (seed) {
            config.seed = *seed;
        }
        if (!out_path.empty()) {
            config.output = out_path;
        }
        if (!histograms.empty()) {
            std::ifstream in(histograms);
            if (!in) {
                throw ConfigError("", "cannot read '" + histograms + "'");
            }
            std::stringstream buffer;
            buffer << in.rdbuf();
            histogram_text = buffer.str();
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        CommandResult result;
        if (exact->parsed()) {
            result = cmd_exact(config);
        } else if (sample->parsed()) {
            result = cmd_sample(config, threads);
        } else if (reconstruct->parsed()) {
            result = cmd_reconstruct(config, histogram_text, threads);
        } else if (snr->parsed()) {
            result = cmd_snr(config, threads);
        }
        if (config.output) {
            write_file(*config.output, result.main);
            for (const ExtraOutput &extra : result.extras) {
                write_file(sibling_path(*config.output, extra.suffix), extra.content);
            }
        } else {
            out << result.main;
            for (const ExtraOutput &extra : result.extras) {
                out << '\n' << extra.content;
            }
        }
        if (!quiet) {
            err << result.summary << (config.output ? " -> " + *config.output : std::string()) << '\n';
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace qcm::cli
