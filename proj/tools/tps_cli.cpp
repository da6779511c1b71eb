// Command-line surface for trajectory scoring, calibration, diagnostics,
// censoring harnesses, and bootstrap reporting over JSONL trajectory logs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tps/tps.hpp"

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
}

void ensure_parent(const std::string& file_path) {
    const auto parent = std::filesystem::path(file_path).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
}

struct TableWriter {
    json metadata = json::object();
    std::vector<std::string> columns;
    std::vector<json> rows;

    void add_row(const json& row) { rows.push_back(row); }

    void write(const std::string& out_dir, const std::string& name) const {
        ensure_dir(out_dir);
        {
            std::ofstream csv(out_dir + "/" + name + ".csv");
            if (!csv) throw tps::InvalidInput("cannot write " + out_dir + "/" + name + ".csv");
            for (const auto& [k, v] : metadata.items())
                csv << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump())
                    << "\n";
            for (std::size_t c = 0; c < columns.size(); ++c)
                csv << columns[c] << (c + 1 < columns.size() ? "," : "\n");
            for (const auto& row : rows) {
                for (std::size_t c = 0; c < columns.size(); ++c) {
                    const auto& v = row.at(columns[c]);
                    if (v.is_number_float())
                        csv << fmt(v.get<double>());
                    else if (v.is_string())
                        csv << v.get<std::string>();
                    else
                        csv << v.dump();
                    csv << (c + 1 < columns.size() ? "," : "\n");
                }
            }
        }
        std::ofstream js(out_dir + "/" + name + ".json");
        if (!js) throw tps::InvalidInput("cannot write " + out_dir + "/" + name + ".json");
        json doc;
        doc["metadata"] = metadata;
        doc["rows"] = rows;
        js << doc.dump(2) << "\n";
    }
};

tps::ScoreFamily parse_family(const std::string& name) {
    if (name == "log") return tps::ScoreFamily::log_score();
    if (name == "brier") return tps::ScoreFamily::brier();
    if (name.rfind("beta:", 0) == 0) {
        const auto rest = name.substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw tps::InvalidInput("family '" + name + "': expected beta:<alpha>:<beta>");
        return tps::ScoreFamily::beta_family(std::stod(rest.substr(0, colon)),
                                             std::stod(rest.substr(colon + 1)));
    }
    throw tps::InvalidInput("unknown family '" + name + "' (use log, brier, beta:a:b)");
}

std::vector<std::string> sorted_stream_names(const std::vector<tps::TrajectoryRecord>& records) {
    std::set<std::string> names;
    for (const auto& rec : records)
        for (const auto& [name, stream] : rec.streams) names.insert(name);
    return {names.begin(), names.end()};
}

// Shared ingestion knobs and disclosure metadata.
struct Inputs {
    std::string input_path;
    std::string out_dir = ".";
    double clip_epsilon = 1e-6;
    bool include_informative = false;

    std::vector<tps::TrajectoryRecord> records;
    std::size_t informative_excluded = 0;

    void load() {
        records = tps::read_jsonl_file(input_path, {clip_epsilon});
        if (!include_informative) {
            const auto old = records.size();
            std::erase_if(records, [](const tps::TrajectoryRecord& r) {
                return r.informative_censoring;
            });
            informative_excluded = old - records.size();
        }
    }

    json base_metadata() const {
        json m;
        m["clip_epsilon"] = clip_epsilon;
        m["orientation"] = "scores: higher is better; aurc/t_ece/t_brier: lower is better";
        m["predictor_order"] = "lexicographic";
        m["informative_censoring"] = include_informative ? "included" : "excluded";
        m["excluded_informative_count"] = informative_excluded;
        return m;
    }
};

void add_common(CLI::App* cmd, Inputs& in) {
    cmd->add_option("-i,--input", in.input_path, "trajectory JSONL file")->required();
    cmd->add_option("-o,--out-dir", in.out_dir, "output directory");
    cmd->add_option("--clip-epsilon", in.clip_epsilon, "probability clip epsilon");
    cmd->add_flag("--include-informative", in.include_informative,
                  "score informatively censored records too (off by default)");
}

std::vector<double> record_weights(const tps::TrajectoryRecord& rec, tps::WeightSchedule sched) {
    return tps::truncated_weights(sched, rec.horizon_T, rec.stop_Z);
}

double score_record(const tps::TrajectoryRecord& rec, const std::vector<double>& stream,
                    tps::WeightSchedule sched, const tps::ScoreFamily& fam,
                    tps::ScoreMode mode) {
    const auto w = record_weights(rec, sched);
    switch (mode) {
        case tps::ScoreMode::complete:
            return tps::tps_complete(stream, *rec.outcome_Y, w, fam, rec.id).total;
        case tps::ScoreMode::cen_simple:
            return tps::tps_cen_simple(stream, rec.delta, rec.outcome_Y, w, fam, rec.id).total;
        case tps::ScoreMode::cen_exact:
            return tps::tps_cen_exact(stream, rec.delta, rec.outcome_Y, rec.qz_estimate, w, fam,
                                      rec.id)
                .total;
    }
    throw tps::InvalidInput("bad score mode");
}

// ---------------------------------------------------------------- score ----

int cmd_score(Inputs& in, const std::vector<std::string>& families,
              const std::vector<std::string>& schedules, const std::vector<std::string>& modes,
              std::size_t B, double level, std::uint64_t seed) {
    in.load();
    TableWriter table;
    table.metadata = in.base_metadata();
    table.metadata["bootstrap_B"] = B;
    table.metadata["bootstrap_level"] = level;
    table.metadata["bootstrap_seed"] = seed;
    table.columns = {"predictor", "family", "schedule", "mode", "n",
                     "mean",      "se",     "ci_low",   "ci_high"};
    const auto predictors = sorted_stream_names(in.records);
    std::map<std::string, std::size_t> missing_stream;
    for (const auto& predictor : predictors) {
        for (const auto& fam_name : families) {
            const auto fam = parse_family(fam_name);
            for (const auto& sched_name : schedules) {
                const auto sched = tps::schedule_from_name(sched_name);
                std::vector<double> complete_scores;
                std::map<std::string, std::vector<double>> mode_scores;
                std::map<std::string, std::vector<double>> censored_scores;
                for (const auto& rec : in.records) {
                    auto it = rec.streams.find(predictor);
                    if (it == rec.streams.end()) {
                        ++missing_stream[predictor];
                        continue;
                    }
                    for (const auto& mode_name : modes) {
                        if (mode_name == "complete") {
                            if (!rec.delta) continue;
                            complete_scores.push_back(score_record(
                                rec, it->second, sched, fam, tps::ScoreMode::complete));
                            mode_scores["complete"].push_back(complete_scores.back());
                        } else {
                            const auto mode = mode_name == "cen-simple"
                                                  ? tps::ScoreMode::cen_simple
                                                  : tps::ScoreMode::cen_exact;
                            const double s = score_record(rec, it->second, sched, fam, mode);
                            mode_scores[mode_name].push_back(s);
                            if (!rec.delta) censored_scores[mode_name].push_back(s);
                        }
                    }
                }
                auto emit = [&](const std::string& mode_label, const tps::BootstrapSummary& bs,
                                std::size_t n) {
                    json row;
                    row["predictor"] = predictor;
                    row["family"] = fam_name;
                    row["schedule"] = sched_name;
                    row["mode"] = mode_label;
                    row["n"] = n;
                    row["mean"] = bs.estimate;
                    row["se"] = bs.se;
                    row["ci_low"] = bs.ci_low;
                    row["ci_high"] = bs.ci_high;
                    table.add_row(row);
                };
                for (const auto& mode_name : modes) {
                    const auto& scores = mode_scores[mode_name];
                    if (scores.empty()) continue;
                    emit(mode_name, tps::bootstrap_mean(scores, B, level, seed), scores.size());
                }
                // Practice gap rows when both a complete and a censored-
                // extension column were requested.
                if (!complete_scores.empty()) {
                    for (const auto& mode_name : modes) {
                        if (mode_name == "complete") continue;
                        if (mode_scores[mode_name].empty()) continue;
                        const auto bs = tps::bootstrap_union_delta_practice(
                            complete_scores, censored_scores[mode_name], B, level, seed);
                        emit("delta-practice(" + mode_name + ")", bs,
                             complete_scores.size() + censored_scores[mode_name].size());
                    }
                }
            }
        }
    }
    json missing = json::object();
    for (const auto& [name, count] : missing_stream) missing[name] = count;
    table.metadata["missing_stream_counts"] = missing;
    table.metadata["calibration_status"] = "as-ingested";
    table.write(in.out_dir, "score");
    return 0;
}

// ------------------------------------------------------------ calibrate ----

int cmd_calibrate(Inputs& in, const std::string& stream, const std::string& sched_name,
                  const std::string& output_path) {
    in.load();
    const auto sched = tps::schedule_from_name(sched_name);
    auto fit = tps::cross_fit(std::move(in.records), stream, sched);
    ensure_parent(output_path);
    tps::write_jsonl_file(output_path, fit.records);
    const auto diag = tps::platt_diagnostics(fit, stream);
    json report;
    report["stream"] = stream;
    report["schedule"] = sched_name;
    report["clip_epsilon"] = in.clip_epsilon;
    report["split_a"] = {{"slope", diag.slope_a},
                         {"intercept", fit.model_a.intercept_a},
                         {"fallback", diag.fallback_a},
                         {"train_base_rate", fit.model_a.train_base_rate}};
    report["split_b"] = {{"slope", diag.slope_b},
                         {"intercept", fit.model_b.intercept_a},
                         {"fallback", diag.fallback_b},
                         {"train_base_rate", fit.model_b.train_base_rate}};
    report["probe_inputs"] = diag.probe_inputs;
    report["probe_mapped_a"] = diag.probe_mapped_a;
    report["probe_mapped_b"] = diag.probe_mapped_b;
    report["calibrated_range"] = {diag.range_low, diag.range_high};
    ensure_dir(in.out_dir);
    std::ofstream js(in.out_dir + "/calibrate.json");
    if (!js) throw tps::InvalidInput("cannot write calibration report");
    js << report.dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------- diagnose ----

struct ScalarSet {
    std::vector<tps::ScalarSummary> summaries;
};

int cmd_diagnose(Inputs& in, const std::string& sched_name, bool fixed_rank,
                 const std::string& rank_aggregator) {
    in.load();
    const auto sched = tps::schedule_from_name(sched_name);
    std::vector<const tps::TrajectoryRecord*> labeled;
    double base_rate = 0.0;
    for (const auto& rec : in.records)
        if (rec.delta) {
            labeled.push_back(&rec);
            base_rate += *rec.outcome_Y;
        }
    if (labeled.empty()) throw tps::EmptyPopulation("diagnose: no labeled records");
    base_rate /= static_cast<double>(labeled.size());

    const std::vector<std::string> agg_names = {"last", "avg", "min", "front-weighted"};
    auto scalar_of = [&](const tps::TrajectoryRecord& rec, const std::vector<double>& stream,
                         const std::string& agg) {
        if (agg == "last") return tps::aggregate(stream, tps::Aggregator::last());
        if (agg == "avg") return tps::aggregate(stream, tps::Aggregator::avg());
        if (agg == "min") return tps::aggregate(stream, tps::Aggregator::min());
        return tps::front_weighted_summary(stream, sched, rec.horizon_T);
    };

    TableWriter table;
    table.metadata = in.base_metadata();
    table.metadata["schedule"] = sched_name;
    table.metadata["base_rate"] = base_rate;
    table.columns = {"predictor", "aggregator", "n", "auroc", "auprc", "aurc", "t_ece", "t_brier"};

    auto predictors = sorted_stream_names(in.records);
    predictors.push_back("base_rate");
    auto metrics_row = [&](const std::string& predictor, const std::string& agg,
                           const std::vector<tps::ScalarSummary>& s) {
        json row;
        row["predictor"] = predictor;
        row["aggregator"] = agg;
        row["n"] = s.size();
        row["auroc"] = tps::auroc_failure(s);
        row["auprc"] = tps::auprc_failure(s);
        row["aurc"] = tps::aurc(s);
        row["t_ece"] = tps::t_ece(s);
        row["t_brier"] = tps::t_brier(s);
        table.add_row(row);
    };
    for (const auto& predictor : predictors) {
        for (const auto& agg : agg_names) {
            std::vector<tps::ScalarSummary> s;
            for (const auto* rec : labeled) {
                double conf;
                if (predictor == "base_rate") {
                    conf = base_rate;
                } else {
                    auto it = rec->streams.find(predictor);
                    if (it == rec->streams.end()) continue;
                    conf = scalar_of(*rec, it->second, agg);
                }
                s.push_back({rec->id, conf, *rec->outcome_Y});
            }
            if (s.empty()) continue;
            metrics_row(predictor, agg, s);
        }
    }
    table.write(in.out_dir, "diagnose");

    if (fixed_rank) {
        TableWriter rt;
        rt.metadata = in.base_metadata();
        rt.metadata["schedule"] = sched_name;
        rt.metadata["aggregator"] = rank_aggregator;
        rt.columns = {"predictor", "transform", "auroc", "auprc", "aurc"};
        for (const auto& predictor : predictors) {
            if (predictor == "base_rate") continue;
            std::vector<tps::ScalarSummary> s;
            for (const auto* rec : labeled) {
                auto it = rec->streams.find(predictor);
                if (it == rec->streams.end()) continue;
                s.push_back({rec->id, scalar_of(*rec, it->second, rank_aggregator),
                             *rec->outcome_Y});
            }
            if (s.empty()) continue;
            // Single global Platt map fitted on the scalars (one-step pseudo
            // records), used purely as the fifth monotone transform.
            std::optional<tps::PlattModel> platt;
            try {
                std::vector<tps::TrajectoryRecord> pseudo;
                std::vector<std::size_t> all;
                for (const auto& sc : s) {
                    tps::TrajectoryRecord rec;
                    rec.id = sc.record_id;
                    rec.horizon_T = 1;
                    rec.stop_Z = 1;
                    rec.delta = true;
                    rec.outcome_Y = sc.label;
                    rec.streams["scalar"] = {sc.confidence};
                    all.push_back(pseudo.size());
                    pseudo.push_back(std::move(rec));
                }
                platt = tps::fit_platt(pseudo, all, "scalar", sched);
            } catch (const tps::Error&) {
                platt.reset();
            }
            const std::vector<std::pair<std::string, tps::RankTransform>> transforms = {
                {"identity", tps::RankTransform::identity},
                {"affine-compress", tps::RankTransform::affine_compress},
                {"sqrt", tps::RankTransform::sqrt_map},
                {"square", tps::RankTransform::square},
                {"platt", tps::RankTransform::platt_model}};
            for (const auto& [tname, kind] : transforms) {
                if (kind == tps::RankTransform::platt_model && !platt) continue;
                std::vector<double> conf;
                conf.reserve(s.size());
                for (const auto& sc : s) conf.push_back(sc.confidence);
                const auto mapped = tps::fixed_rank_transform(
                    conf, kind, platt ? &*platt : nullptr);
                std::vector<tps::ScalarSummary> ts = s;
                for (std::size_t i = 0; i < ts.size(); ++i) ts[i].confidence = mapped[i];
                json row;
                row["predictor"] = predictor;
                row["transform"] = tname;
                row["auroc"] = tps::auroc_failure(ts);
                row["auprc"] = tps::auprc_failure(ts);
                row["aurc"] = tps::aurc(ts);
                rt.add_row(row);
            }
        }
        rt.write(in.out_dir, "diagnose_fixed_rank");
    }
    return 0;
}

// ----------------------------------------------------------- censor-sim ----

int cmd_censor_sim(Inputs& in, const std::string& stream,
                   const std::vector<std::string>& families,
                   const std::vector<std::string>& schedules, std::vector<double> rates,
                   std::uint64_t seed) {
    in.load();
    for (const auto& rec : in.records)
        if (!rec.delta) throw tps::WrongMode("censor-sim: input must be a complete population");
    TableWriter table;
    table.metadata = in.base_metadata();
    table.metadata["stream"] = stream;
    table.metadata["censor_seed"] = seed;
    table.columns = {"family",  "schedule",     "rate",        "n_censored",
                     "delta_mean", "delta_y0",  "delta_y1",    "prefix_swap_mean",
                     "tail_omission_mean",      "identity_residual_max"};
    double worst_residual = 0.0;
    for (const auto& fam_name : families) {
        const auto fam = parse_family(fam_name);
        for (const auto& sched_name : schedules) {
            const auto sched = tps::schedule_from_name(sched_name);
            for (double rate : rates) {
                auto cut = tps::artificial_censor(in.records, rate, seed);
                double d_sum = 0, d0_sum = 0, d1_sum = 0, swap_sum = 0, tail_sum = 0;
                std::size_t n = 0, n0 = 0, n1 = 0;
                double residual_max = 0.0;
                std::map<std::string, const tps::TrajectoryRecord*> full_by_id;
                for (const auto& rec : in.records) full_by_id[rec.id] = &rec;
                for (const auto& rec : cut.records) {
                    if (rec.delta) continue;
                    const auto& full = *full_by_id.at(rec.id);
                    const auto& full_stream = full.streams.at(stream);
                    const int y = cut.hidden_outcomes.at(rec.id);
                    const auto w_full = record_weights(full, sched);
                    const double complete =
                        tps::tps_complete(full_stream, y, w_full, fam).total;
                    std::vector<double> prefix(full_stream.begin(),
                                               full_stream.begin() +
                                                   static_cast<std::ptrdiff_t>(rec.stop_Z));
                    const auto w_cut = record_weights(rec, sched);
                    const double simple =
                        tps::tps_cen_simple(prefix, false, std::nullopt, w_cut, fam).total;
                    const auto shift = tps::decompose_censoring_shift(full_stream, y, rec.stop_Z,
                                                                      w_full, fam);
                    const double delta = simple - complete;
                    residual_max = std::max(
                        residual_max,
                        std::fabs(shift.prefix_swap + shift.tail_omission - delta));
                    d_sum += delta;
                    swap_sum += shift.prefix_swap;
                    tail_sum += shift.tail_omission;
                    ++n;
                    if (y == 0) {
                        d0_sum += delta;
                        ++n0;
                    } else {
                        d1_sum += delta;
                        ++n1;
                    }
                }
                worst_residual = std::max(worst_residual, residual_max);
                json row;
                row["family"] = fam_name;
                row["schedule"] = sched_name;
                row["rate"] = rate;
                row["n_censored"] = n;
                row["delta_mean"] = n ? d_sum / n : 0.0;
                row["delta_y0"] = n0 ? d0_sum / n0 : 0.0;
                row["delta_y1"] = n1 ? d1_sum / n1 : 0.0;
                row["prefix_swap_mean"] = n ? swap_sum / n : 0.0;
                row["tail_omission_mean"] = n ? tail_sum / n : 0.0;
                row["identity_residual_max"] = residual_max;
                table.add_row(row);
            }
        }
    }
    table.write(in.out_dir, "censor_sim");
    if (worst_residual > 1e-12) {
        std::cerr << "identity check failed: max residual " << fmt(worst_residual) << "\n";
        return 4;
    }
    return 0;
}

// ------------------------------------------------------------- qz-audit ----

int cmd_qz_audit(Inputs& in, const std::string& audit_path, const std::string& stream,
                 const std::string& fam_name, const std::string& sched_name,
                 std::size_t min_branches) {
    in.load();
    const auto fam = parse_family(fam_name);
    const auto sched = tps::schedule_from_name(sched_name);

    std::map<std::string, std::vector<std::optional<int>>> audits;
    {
        std::ifstream af(audit_path);
        if (!af) throw tps::InvalidInput("cannot open audit file '" + audit_path + "'");
        std::string line;
        while (std::getline(af, line)) {
            if (line.empty()) continue;
            const json j = json::parse(line);
            std::vector<std::optional<int>> branches;
            for (const auto& b : j.at("branches"))
                branches.push_back(b.is_null() ? std::nullopt
                                               : std::optional<int>(b.get<int>()));
            audits[j.at("id").get<std::string>()] = std::move(branches);
        }
    }
    std::map<std::string, const tps::TrajectoryRecord*> by_id;
    for (const auto& rec : in.records) by_id[rec.id] = &rec;

    TableWriter table;
    table.metadata = in.base_metadata();
    table.metadata["family"] = fam_name;
    table.metadata["schedule"] = sched_name;
    table.metadata["min_valid_branches"] = min_branches;
    table.columns = {"id",        "valid_branches", "qz_mc",      "simple", "exact",
                     "delta",     "delta_as_fail",  "delta_as_succ", "projection_residual"};
    std::size_t unmatched = 0, excluded = 0;
    double worst_residual = 0.0;
    for (const auto& [id, branches] : audits) {
        auto it = by_id.find(id);
        if (it == by_id.end() || it->second->delta ||
            !it->second->streams.count(stream)) {
            std::cerr << "warning: audit id '" << id << "' has no matching censored record\n";
            ++unmatched;
            continue;
        }
        tps::ContinuationAudit valid{id, {}, };
        std::vector<int> as_fail, as_succ;
        for (const auto& b : branches) {
            if (b) valid.branch_outcomes.push_back(*b);
            as_fail.push_back(b.value_or(0));
            as_succ.push_back(b.value_or(1));
        }
        if (valid.valid_count() < min_branches) {
            ++excluded;
            continue;
        }
        const auto& rec = *it->second;
        const auto& prefix = rec.streams.at(stream);
        const auto w = record_weights(rec, sched);
        const double qz = tps::mc_qz(valid, min_branches);
        const double simple = tps::tps_cen_simple(prefix, false, std::nullopt, w, fam).total;
        const double exact =
            tps::tps_cen_exact(prefix, false, std::nullopt, qz, w, fam).total;
        auto delta_with = [&](double q) {
            return tps::tps_cen_exact(prefix, false, std::nullopt, q, w, fam).total - simple;
        };
        auto mean_of = [](const std::vector<int>& v) {
            double acc = 0;
            for (int y : v) acc += y;
            return acc / static_cast<double>(v.size());
        };
        const double residual = tps::conditional_projection_check(prefix, w, fam, valid, 1);
        worst_residual = std::max(worst_residual, residual);
        json row;
        row["id"] = id;
        row["valid_branches"] = valid.valid_count();
        row["qz_mc"] = qz;
        row["simple"] = simple;
        row["exact"] = exact;
        row["delta"] = exact - simple;
        row["delta_as_fail"] = delta_with(mean_of(as_fail));
        row["delta_as_succ"] = delta_with(mean_of(as_succ));
        row["projection_residual"] = residual;
        table.add_row(row);
    }
    table.metadata["unmatched_audit_ids"] = unmatched;
    table.metadata["excluded_prefixes"] = excluded;
    table.write(in.out_dir, "qz_audit");
    if (worst_residual > 1e-12) {
        std::cerr << "projection identity failed: max residual " << fmt(worst_residual) << "\n";
        return 4;
    }
    return 0;
}

// ------------------------------------------------------ counterexamples ----

int cmd_counterexamples() {
    const auto a = tps::counterexample_calibration_blindness();
    const auto b = tps::counterexample_aggregator_impropriety();
    bool ok = true;
    auto check = [&](const char* name, double got, double want) {
        const bool pass = got == want;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << name << " = " << fmt(got) << " (expected "
                  << fmt(want) << ")\n";
    };
    check("tece_truthful", a.tece_truthful, 0.0);
    check("tece_constant", a.tece_constant, 0.0);
    check("brier_resolution", a.brier_resolution, 0.09);
    check("avg_excess", b.avg_excess, 0.01);
    check("min_gap_event", b.min_gap_event, -0.04);
    check("weighted_diff", b.weighted_diff, 0.0);
    std::cout << (b.last_tie ? "PASS " : "FAIL ") << "last_tie\n";
    ok = ok && b.last_tie;
    return ok ? 0 : 4;
}

// ------------------------------------------------------------- generate ----

int cmd_generate(const std::string& output_path, std::size_t n, std::size_t horizon,
                 double prior, double theta, std::uint64_t seed, double censor_rate,
                 std::uint64_t censor_seed, const std::string& hidden_path) {
    tps::SignalWorld world{horizon, prior, theta, seed};
    auto records = tps::generate_population(world, n);
    if (censor_rate > 0.0) {
        auto cut = tps::artificial_censor(std::move(records), censor_rate, censor_seed);
        records = std::move(cut.records);
        if (!hidden_path.empty()) {
            ensure_parent(hidden_path);
            std::ofstream hf(hidden_path);
            if (!hf) throw tps::InvalidInput("cannot write hidden-outcome file");
            for (const auto& [id, y] : cut.hidden_outcomes)
                hf << json{{"id", id}, {"outcome_Y", y}}.dump() << "\n";
        }
    }
    ensure_parent(output_path);
    tps::write_jsonl_file(output_path, records);
    return 0;
}

// ------------------------------------------------------------ bootstrap ----

int cmd_bootstrap(Inputs& in, const std::string& stream, const std::string& versus,
                  const std::string& fam_name, const std::string& sched_name,
                  const std::string& mode_name, bool delta_practice, std::size_t B,
                  double level, std::uint64_t seed) {
    in.load();
    const auto fam = parse_family(fam_name);
    const auto sched = tps::schedule_from_name(sched_name);
    const auto mode = mode_name == "complete"     ? tps::ScoreMode::complete
                      : mode_name == "cen-simple" ? tps::ScoreMode::cen_simple
                                                  : tps::ScoreMode::cen_exact;
    auto scores_for = [&](const std::string& name, bool censored_only, bool complete_only) {
        std::vector<double> out;
        for (const auto& rec : in.records) {
            auto it = rec.streams.find(name);
            if (it == rec.streams.end()) continue;
            if (censored_only && rec.delta) continue;
            if (complete_only && !rec.delta) continue;
            if (mode == tps::ScoreMode::complete && !rec.delta) continue;
            out.push_back(score_record(rec, it->second, sched, fam, mode));
        }
        return out;
    };
    tps::BootstrapSummary bs;
    std::string kind;
    if (delta_practice) {
        kind = "union-delta-practice";
        const auto censored_mode =
            mode == tps::ScoreMode::complete ? tps::ScoreMode::cen_simple : mode;
        std::vector<double> complete_scores, censored_scores;
        for (const auto& rec : in.records) {
            auto it = rec.streams.find(stream);
            if (it == rec.streams.end()) continue;
            if (rec.delta)
                complete_scores.push_back(
                    score_record(rec, it->second, sched, fam, tps::ScoreMode::complete));
            else
                censored_scores.push_back(
                    score_record(rec, it->second, sched, fam, censored_mode));
        }
        bs = tps::bootstrap_union_delta_practice(complete_scores, censored_scores, B, level,
                                                 seed);
    } else if (!versus.empty()) {
        kind = "paired-diff";
        const auto a = scores_for(stream, false, mode == tps::ScoreMode::complete);
        const auto b2 = scores_for(versus, false, mode == tps::ScoreMode::complete);
        bs = tps::bootstrap_paired_diff(a, b2, B, level, seed);
    } else {
        kind = "mean";
        bs = tps::bootstrap_mean(scores_for(stream, false, mode == tps::ScoreMode::complete), B,
                                 level, seed);
    }
    json report = in.base_metadata();
    report["kind"] = kind;
    report["stream"] = stream;
    if (!versus.empty()) report["versus"] = versus;
    report["family"] = fam_name;
    report["schedule"] = sched_name;
    report["mode"] = mode_name;
    report["estimate"] = bs.estimate;
    report["se"] = bs.se;
    report["ci_low"] = bs.ci_low;
    report["ci_high"] = bs.ci_high;
    report["t_ratio"] = bs.se > 0.0 ? json(bs.t_ratio()) : json();
    report["replicates"] = bs.replicates;
    report["seed"] = bs.seed;
    ensure_dir(in.out_dir);
    std::ofstream js(in.out_dir + "/bootstrap.json");
    if (!js) throw tps::InvalidInput("cannot write bootstrap report");
    js << report.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trajectory-level proper scoring for agentic uncertainty streams"};
    app.require_subcommand(1);
    app.set_config("--config");

    Inputs in;
    std::vector<std::string> families = {"log", "brier"};
    std::vector<std::string> schedules = {"linear-front"};
    std::vector<std::string> modes = {"complete"};
    std::size_t B = 1000;
    double level = 0.95;
    std::uint64_t seed = 42;

    auto* score = app.add_subcommand("score", "score trajectories per predictor/family/schedule");
    add_common(score, in);
    score->add_option("--family", families, "score families (log, brier, beta:a:b)");
    score->add_option("--schedule", schedules, "weight schedules");
    score->add_option("--mode", modes, "modes: complete, cen-simple, cen-exact");
    score->add_option("-B,--replicates", B, "bootstrap replicates");
    score->add_option("--level", level, "bootstrap confidence level");
    score->add_option("--seed", seed, "bootstrap seed");

    std::string stream = "q_true", versus, sched_one = "linear-front", fam_one = "log";
    std::string cal_output = "calibrated.jsonl";
    auto* calibrate = app.add_subcommand("calibrate", "cross-fitted Platt recalibration");
    add_common(calibrate, in);
    calibrate->add_option("--stream", stream, "stream to calibrate")->required();
    calibrate->add_option("--schedule", sched_one, "weight schedule for fitting");
    calibrate->add_option("--output", cal_output, "calibrated JSONL output path");

    bool fixed_rank = false;
    std::string rank_agg = "avg";
    auto* diagnose = app.add_subcommand("diagnose", "scalar trajectory diagnostics");
    add_common(diagnose, in);
    diagnose->add_option("--schedule", sched_one, "schedule for the front-weighted aggregator");
    diagnose->add_flag("--fixed-rank", fixed_rank, "also emit the five-transform rank table");
    diagnose->add_option("--rank-aggregator", rank_agg, "aggregator for the rank table");

    std::vector<double> rates = {0.25, 0.5, 0.75};
    std::uint64_t censor_seed = 42;
    auto* censor = app.add_subcommand("censor-sim", "artificial-censoring robustness sweep");
    add_common(censor, in);
    censor->add_option("--stream", stream, "forecast stream to score");
    censor->add_option("--family", families, "score families");
    censor->add_option("--schedule", schedules, "weight schedules");
    censor->add_option("--rate", rates, "censoring rates");
    censor->add_option("--seed", censor_seed, "censoring seed");

    std::string audit_path;
    std::size_t min_branches = 5;
    auto* qz = app.add_subcommand("qz-audit", "exact-vs-simple censored score audit");
    add_common(qz, in);
    qz->add_option("--audit", audit_path, "JSONL of {id, branches:[0|1|null]}")->required();
    qz->add_option("--stream", stream, "forecast stream");
    qz->add_option("--family", fam_one, "score family");
    qz->add_option("--schedule", sched_one, "weight schedule");
    qz->add_option("--min-branches", min_branches, "retention minimum for valid branches");

    auto* counter = app.add_subcommand("counterexamples", "check the analytic counterexample constants");

    std::string gen_output = "population.jsonl", hidden_path;
    std::size_t gen_n = 1000, gen_T = 8;
    double gen_prior = 0.5, gen_theta = 0.7, gen_rate = 0.0;
    std::uint64_t gen_seed = 42;
    auto* generate = app.add_subcommand("generate", "synthetic trajectory population");
    generate->add_option("--output", gen_output, "output JSONL path");
    generate->add_option("-n,--count", gen_n, "population size");
    generate->add_option("--horizon", gen_T, "horizon T");
    generate->add_option("--prior", gen_prior, "prior success probability");
    generate->add_option("--theta", gen_theta, "signal accuracy in (0.5, 1)");
    generate->add_option("--seed", gen_seed, "generation seed");
    generate->add_option("--censor-rate", gen_rate, "artificial censoring rate");
    generate->add_option("--censor-seed", censor_seed, "censoring seed");
    generate->add_option("--hidden-outcomes", hidden_path, "write hidden outcomes JSONL here");

    bool delta_practice = false;
    std::string mode_one = "complete";
    auto* boot = app.add_subcommand("bootstrap", "bootstrap summaries of trajectory scores");
    add_common(boot, in);
    boot->add_option("--stream", stream, "forecast stream");
    boot->add_option("--versus", versus, "second stream for a paired difference");
    boot->add_option("--family", fam_one, "score family");
    boot->add_option("--schedule", sched_one, "weight schedule");
    boot->add_option("--mode", mode_one, "scoring mode");
    boot->add_flag("--delta-practice", delta_practice, "union practice-gap bootstrap");
    boot->add_option("-B,--replicates", B, "bootstrap replicates");
    boot->add_option("--level", level, "confidence level");
    boot->add_option("--seed", seed, "bootstrap seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) return cmd_score(in, families, schedules, modes, B, level, seed);
        if (calibrate->parsed()) return cmd_calibrate(in, stream, sched_one, cal_output);
        if (diagnose->parsed()) return cmd_diagnose(in, sched_one, fixed_rank, rank_agg);
        if (censor->parsed())
            return cmd_censor_sim(in, stream, families, schedules, rates, censor_seed);
        if (qz->parsed())
            return cmd_qz_audit(in, audit_path, stream, fam_one, sched_one, min_branches);
        if (counter->parsed()) return cmd_counterexamples();
        if (generate->parsed())
            return cmd_generate(gen_output, gen_n, gen_T, gen_prior, gen_theta, gen_seed,
                                gen_rate, censor_seed, hidden_path);
        if (boot->parsed())
            return cmd_bootstrap(in, stream, versus, fam_one, sched_one, mode_one,
                                 delta_practice, B, level, seed);
    } catch (const tps::UndefinedMetric& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const tps::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
