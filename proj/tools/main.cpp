// povmkit command line: builds localization observables from JSON configs,
// runs the selected analyses, and persists deterministic JSON/CSV reports.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmkit/analysis.hpp"
#include "povmkit/marginals.hpp"
#include "povmkit/rng.hpp"
#include "povmkit/serialize.hpp"
#include "povmkit/version.hpp"

namespace fs = std::filesystem;
using namespace povmkit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunContext {
    Json config;
    Tolerances tol;
    std::optional<uint64_t> seed;
    fs::path out_dir;
    bool quiet = false;
};

struct Artifact {
    std::string name;      // manifest key
    std::string filename;  // relative to out dir
    std::string contents;
};

struct AnalysisOutcome {
    Json result;
    bool passed = false;
    std::vector<Artifact> artifacts;
};

struct Construction {
    std::string kind;
    DiscretePOVM povm;
    std::optional<WeylSystem> sys;
    std::optional<FiducialVector> fiducial;
    std::optional<CoherentGrid> grid;
};

uint64_t require_seed(const RunContext& ctx, const std::string& why) {
    if (!ctx.seed) throw ConfigError("a seed is required: " + why);
    return *ctx.seed;
}

FiducialVector parse_fiducial(const Json& cfg, int dim, bool fock, const RunContext& ctx) {
    const std::string label = cfg.value("label", std::string("basis"));
    if (label == "basis") return FiducialVector::basis(dim, cfg.value("index", 0));
    if (label == "uniform") return FiducialVector::uniform(dim);
    if (label == "gaussian") {
        const double width = cfg.value("width", 1.0);
        return fock ? FiducialVector::gaussian_fock(dim, width)
                    : FiducialVector::gaussian_lattice(dim, width);
    }
    if (label == "custom") {
        if (!cfg.contains("amplitudes")) throw ConfigError("custom fiducial needs \"amplitudes\"");
        Vector v(static_cast<Eigen::Index>(cfg.at("amplitudes").size()));
        for (size_t i = 0; i < cfg.at("amplitudes").size(); ++i) {
            const auto& pair = cfg.at("amplitudes")[i];
            v[static_cast<Eigen::Index>(i)] = Complex(pair[0].get<double>(), pair[1].get<double>());
        }
        if (v.size() != dim) throw ConfigError("custom fiducial has the wrong dimension");
        return FiducialVector::custom(StateVector(std::move(v)));
    }
    if (label == "random") {
        Rng rng(require_seed(ctx, "the fiducial is drawn at random"));
        return FiducialVector::custom(StateVector(rng.unit_vector(dim)));
    }
    throw ConfigError("unknown fiducial label '" + label + "'");
}

Construction construct(const RunContext& ctx) {
    if (!ctx.config.contains("construction")) throw ConfigError("config is missing \"construction\"");
    const Json& c = ctx.config.at("construction");
    const std::string kind = c.value("kind", std::string());
    std::optional<double> threshold;
    if (c.contains("thresholds") && c.at("thresholds").contains("normalization"))
        threshold = c.at("thresholds").at("normalization").get<double>();

    if (kind == "wh") {
        const int d = c.value("d", 0);
        if (d < 2) throw ConfigError("wh construction needs \"d\" >= 2");
        WeylSystem sys(d);
        FiducialVector eta = parse_fiducial(c.value("fiducial", Json::object()), d, false, ctx);
        DiscretePOVM povm = build_wh_povm(sys, eta, ctx.tol, threshold);
        return {kind, std::move(povm), std::move(sys), std::move(eta), std::nullopt};
    }
    if (kind == "coherent") {
        if (!(c.contains("N") && c.contains("L") && c.contains("h")))
            throw ConfigError("coherent construction needs \"N\", \"L\", \"h\"");
        const CoherentGrid grid =
            CoherentGrid::make(c.at("N").get<int>(), c.at("L").get<double>(), c.at("h").get<double>());
        FiducialVector eta =
            parse_fiducial(c.value("fiducial", Json::object()), grid.fock_dim, true, ctx);
        DiscretePOVM povm = build_coherent_povm(grid, eta, ctx.tol, threshold);
        return {kind, std::move(povm), std::nullopt, std::move(eta), grid};
    }
    if (kind == "sharp") {
        const int d = c.value("d", 0);
        if (d < 1) throw ConfigError("sharp construction needs \"d\" >= 1");
        return {kind, make_sharp_position_pvm(d, ctx.tol), std::nullopt, std::nullopt, std::nullopt};
    }
    if (kind == "smeared") {
        const int d = c.value("d", 0);
        if (d < 1) throw ConfigError("smeared construction needs \"d\" >= 1");
        if (!ctx.config.contains("kernel")) throw ConfigError("smeared construction needs \"kernel\"");
        const Json& rows = ctx.config.at("kernel");
        RealMatrix k(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.at(0).size()));
        for (size_t x = 0; x < rows.size(); ++x)
            for (size_t j = 0; j < rows[x].size(); ++j)
                k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(j)) = rows[x][j].get<double>();
        if (k.rows() != d) throw ConfigError("kernel must have one row per spectral point");
        SmearedObservable s =
            smear_pvm(make_sharp_position_pvm(d, ctx.tol), MarkovKernel(k, ctx.tol.kernel_row), ctx.tol);
        return {kind, std::move(s.povm), std::nullopt, std::nullopt, std::nullopt};
    }
    throw ConfigError("unknown construction kind '" + kind + "'");
}

Json event_to_json(const EventSet& ev) {
    Json arr = Json::array();
    for (int i : ev.indices()) arr.push_back(i);
    return arr;
}

Json amplitudes_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
    return arr;
}

AnalysisOutcome run_validate(const RunContext& ctx, const Construction& con) {
    const auto rep = validate_povm(con.povm, ctx.tol);
    AnalysisOutcome out;
    double worst_min = 0.0, worst_norm = 0.0;
    for (const auto& row : rep.atoms) {
        worst_min = std::min(worst_min, row.min_eig);
        worst_norm = std::max(worst_norm, row.norm);
    }
    out.result = {{"normalization_defect", rep.normalization_defect},
                  {"defect_threshold", rep.defect_threshold},
                  {"atoms_ok", rep.atoms_ok},
                  {"defect_ok", rep.defect_ok},
                  {"worst_min_eigenvalue", worst_min},
                  {"worst_atom_norm", worst_norm},
                  {"passed", rep.passed}};
    out.passed = rep.passed;
    return out;
}

AnalysisOutcome run_covariance(const RunContext& ctx, const Construction& con) {
    if (!con.sys) throw ConfigError("covariance analysis applies to the wh construction only");
    const int d = con.sys->dim();
    double worst = 0.0;
    int checked = 0;
    if (d <= 8) {
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                worst = std::max(worst, covariance_check(con.povm, *con.sys, a, b));
                ++checked;
            }
    } else {
        Rng rng(require_seed(ctx, "covariance shifts are sampled for d > 8") ^ 0x9e3779b97f4a7c15ull);
        for (int k = 0; k < 50; ++k) {
            worst = std::max(worst, covariance_check(con.povm, *con.sys, rng.uniform_int(0, d - 1),
                                                     rng.uniform_int(0, d - 1)));
            ++checked;
        }
    }
    AnalysisOutcome out;
    out.passed = worst <= ctx.tol.covariance;
    out.result = {{"max_deviation", worst},
                  {"shifts_checked", checked},
                  {"exhaustive", d <= 8},
                  {"passed", out.passed}};
    return out;
}

std::vector<EventSet> analysis_event_menu(const RunContext& ctx, const DiscretePOVM& povm) {
    const int count = ctx.config.contains("events")
                          ? ctx.config.at("events").value("count", 200)
                          : 200;
    uint64_t seed = 0;
    if (povm.atom_count() > 12) seed = require_seed(ctx, "events are sampled on large spaces");
    return analysis_events(povm.space(), seed, count);
}

AnalysisOutcome run_norm1(const RunContext& ctx, const Construction& con) {
    const auto events = analysis_event_menu(ctx, con.povm);
    const auto rep = norm1_report(con.povm, events, ctx.tol.equality, ctx.tol);
    AnalysisOutcome out;
    Json records = Json::array();
    for (const auto& rec : rep.records) {
        Json r = {{"event", event_to_json(rec.event)},
                  {"nonzero", rec.nonzero},
                  {"norm", rec.norm},
                  {"gap", rec.gap}};
        if (rec.nonzero) {
            r["maximizer"] = amplitudes_to_json(rec.maximizer);
            r["maximizer_value"] = rec.maximizer_value;
        }
        records.push_back(std::move(r));
    }
    out.passed = rep.verdict == Norm1Verdict::HasNorm1;
    out.result = {{"verdict", norm1_verdict_name(rep.verdict)},
                  {"events_tested", events.size()},
                  {"failing_events", rep.failing_records.size()},
                  {"worst_gap", rep.worst_gap},
                  {"records", std::move(records)},
                  {"passed", out.passed}};
    return out;
}

AnalysisOutcome run_necessary_condition(const RunContext& ctx, const Construction& con) {
    const auto rep = necessary_condition_verdict(con.povm, ctx.tol.zero, ctx.tol);
    AnalysisOutcome out;
    out.passed = rep.verdict == NecessaryConditionVerdict::Inconclusive;
    Json witnesses = Json::array();
    for (int w : rep.witnesses) witnesses.push_back(w);
    out.result = {{"verdict", rep.verdict == NecessaryConditionVerdict::Excluded ? "norm-1-excluded"
                                                                                 : "inconclusive"},
                  {"witness_atoms", std::move(witnesses)},
                  {"max_atom_norm", rep.max_atom_norm},
                  {"min_support_norm", rep.min_support_norm},
                  {"passed", out.passed}};
    return out;
}

std::string continuity_csv(const std::string& direction, const ContinuityReport& rep) {
    std::ostringstream csv;
    csv << "direction,level,measure,norm_dev,bound,dominated,identity_gap\n";
    for (size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& row = rep.rows[i];
        csv << direction << ',' << i << ',' << format_double_17(row.measure) << ','
            << format_double_17(row.norm_dev) << ',' << format_double_17(row.bound) << ','
            << (row.dominated ? 1 : 0) << ',' << format_double_17(row.identity_gap) << '\n';
    }
    return csv.str();
}

Json continuity_json(const ContinuityReport& rep) {
    Json rows = Json::array();
    for (const auto& row : rep.rows)
        rows.push_back({{"measure", row.measure},
                        {"norm_dev", row.norm_dev},
                        {"bound", row.bound},
                        {"dominated", row.dominated},
                        {"identity_gap", row.identity_gap}});
    return {{"c", rep.c},
            {"c_finite", rep.c_finite},
            {"all_dominated", rep.all_dominated},
            {"final_norm_dev", rep.final_norm_dev},
            {"final_identity_gap", rep.final_identity_gap},
            {"rows", rows}};
}

AnalysisOutcome run_refinement(const RunContext& ctx, const Construction& con) {
    const int n = con.povm.atom_count();
    // Increasing prefixes exhausting the space, and the matching tails
    // decreasing to the empty event.
    std::vector<int> steps;
    for (int size = 1; size < n; size = std::max(size + 1, (size * 3) / 2)) steps.push_back(size);
    steps.push_back(n);

    RefinementSequence up;
    up.direction = RefinementDirection::IncreasingToEvent;
    up.limit = EventSet::full(n);
    RefinementSequence down;
    down.direction = RefinementDirection::DecreasingToEmpty;
    for (int size : steps) {
        std::vector<int> head(static_cast<size_t>(size));
        for (int i = 0; i < size; ++i) head[static_cast<size_t>(i)] = i;
        up.events.emplace_back(std::move(head));
    }
    for (int size : steps) {
        std::vector<int> tail(static_cast<size_t>(n - size));
        for (int i = size; i < n; ++i) tail[static_cast<size_t>(i - size)] = i;
        down.events.emplace_back(std::move(tail));
    }

    const auto up_rep = refinement_check(con.povm, up, ctx.tol);
    const auto down_rep = refinement_check(con.povm, down, ctx.tol);

    AnalysisOutcome out;
    const bool final_ok = up_rep.final_identity_gap <= con.povm.normalization_defect() + 1e-10;
    out.passed = up_rep.all_dominated && down_rep.all_dominated && final_ok;
    out.result = {{"increasing", continuity_json(up_rep)},
                  {"decreasing", continuity_json(down_rep)},
                  {"final_identity_gap_ok", final_ok},
                  {"passed", out.passed}};
    out.artifacts.push_back(
        {"refinement_csv", "refinement.csv",
         continuity_csv("increasing-to-full", up_rep) + continuity_csv("decreasing-to-empty", down_rep)});
    return out;
}

int nearest_origin_cell(const OutcomeSpace& space) {
    int best = 0;
    double best_r2 = 1e300;
    for (int i = 0; i < space.size(); ++i) {
        const auto& a = space.atom(i);
        const double r2 = a.coord[0] * a.coord[0] + a.coord[1] * a.coord[1];
        if (r2 < best_r2) {
            best_r2 = r2;
            best = i;
        }
    }
    return best;
}

AnalysisOutcome run_scaling(const RunContext& ctx, const Construction& con) {
    if (!con.grid || !con.fiducial)
        throw ConfigError("scaling analysis applies to the coherent construction only");
    const int levels = ctx.config.contains("sweep") ? ctx.config.at("sweep").value("levels", 4) : 4;
    if (levels < 2) throw ConfigError("sweep.levels must be at least 2");
    const auto family =
        build_coherent_family(*con.grid, *con.fiducial, levels, ctx.tol, con.povm.defect_threshold());
    const auto fit = cell_shrink_scaling(family);

    // Shrinking single cells across the nested grids.
    std::vector<EventSet> cells;
    for (const auto& level : family) cells.push_back(EventSet::single(nearest_origin_cell(level.space())));
    const auto shrink = refinement_check_family(family, cells, ctx.tol);

    AnalysisOutcome out;
    const bool slope_ok = fit.slope >= 0.9 && fit.slope <= 1.1;
    out.passed = slope_ok && shrink.all_dominated;
    Json points = Json::array();
    std::ostringstream csv;
    csv << "level,cell_measure,worst_cell_norm,log_measure,log_norm\n";
    for (size_t i = 0; i < fit.points.size(); ++i) {
        points.push_back({{"log_measure", fit.points[i][0]}, {"log_norm", fit.points[i][1]}});
        csv << i << ',' << format_double_17(std::exp(fit.points[i][0])) << ','
            << format_double_17(std::exp(fit.points[i][1])) << ','
            << format_double_17(fit.points[i][0]) << ',' << format_double_17(fit.points[i][1]) << '\n';
    }
    out.result = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"levels", levels},
                  {"slope_in_window", slope_ok},
                  {"points", points},
                  {"shrinking_cells", continuity_json(shrink)},
                  {"passed", out.passed}};
    out.artifacts.push_back({"scaling_csv", "scaling.csv", csv.str()});
    out.artifacts.push_back(
        {"shrink_csv", "shrink.csv", continuity_csv("decreasing-to-atom", shrink)});
    return out;
}

AnalysisOutcome run_marginals(const RunContext& ctx, const Construction& con) {
    if (!con.povm.space().is_product())
        throw ConfigError("marginals analysis needs a product outcome space");
    const DiscretePOVM mq = marginal_q(con.povm, ctx.tol);
    const DiscretePOVM mp = marginal_p(con.povm, ctx.tol);
    const auto vq = validate_povm(mq, ctx.tol);
    const auto vp = validate_povm(mp, ctx.tol);

    AnalysisOutcome out;
    out.result = {{"q", {{"defect", mq.normalization_defect()}, {"validate_passed", vq.passed}}},
                  {"p", {{"defect", mp.normalization_defect()}, {"validate_passed", vp.passed}}}};
    out.passed = vq.passed && vp.passed;

    if (con.kind == "wh") {
        const auto cq = is_commutative(mq, ctx.tol.commutativity);
        const auto cp = is_commutative(mp, ctx.tol.commutativity);
        out.result["q"]["commutative"] = cq.commutative;
        out.result["p"]["commutative"] = cp.commutative;
        const auto parent = is_commutative(con.povm, ctx.tol.commutativity);
        out.result["parent_commutative"] = parent.commutative;
        out.result["parent_worst_commutator"] = parent.worst_norm;

        const int d = con.povm.dim();
        const auto kq = extract_kernel(mq, computational_basis(d), ctx.tol);
        const auto kp = extract_kernel(mp, fourier_basis(d), ctx.tol);
        out.result["q"]["kernel_ok"] = kq.ok;
        out.result["p"]["kernel_ok"] = kp.ok;
        out.passed = out.passed && cq.commutative && cp.commutative && kq.ok && kp.ok;
        if (kq.ok)
            out.artifacts.push_back({"kernel_q_csv", "kernel_q.csv",
                                     kernel_to_csv(MarkovKernel(kq.entries, ctx.tol.kernel_row))});
        if (kp.ok)
            out.artifacts.push_back({"kernel_p_csv", "kernel_p.csv",
                                     kernel_to_csv(MarkovKernel(kp.entries, ctx.tol.kernel_row))});
    }

    out.result["passed"] = out.passed;
    out.artifacts.push_back({"marginal_q", "marginal_q.json", povm_to_json(mq).dump(2) + "\n"});
    out.artifacts.push_back({"marginal_p", "marginal_p.json", povm_to_json(mp).dump(2) + "\n"});
    return out;
}

AnalysisOutcome run_kernel_identity(const RunContext& ctx, const Construction& con) {
    if (con.kind != "wh" || !con.fiducial)
        throw ConfigError("kernel-identity analysis applies to the wh construction only");
    const auto dev = marginal_kernel_identity_deviation(con.povm.dim(), *con.fiducial, ctx.tol);
    AnalysisOutcome out;
    out.passed = dev.entrywise <= ctx.tol.equality;
    out.result = {{"max_entrywise_deviation", dev.entrywise},
                  {"max_spectral_deviation", dev.spectral},
                  {"passed", out.passed}};
    return out;
}

AnalysisOutcome run_joint_bound(const RunContext& ctx, const Construction& con) {
    if (!con.povm.space().is_product())
        throw ConfigError("joint-bound analysis needs a product outcome space");
    const OutcomeSpace& space = con.povm.space();
    EventSet dq = EventSet::single(space.rows() / 2);
    EventSet dp = EventSet::single(space.cols() / 2);
    if (ctx.config.contains("joint")) {
        const Json& jj = ctx.config.at("joint");
        if (jj.contains("dq")) dq = EventSet(jj.at("dq").get<std::vector<int>>());
        if (jj.contains("dp")) dp = EventSet(jj.at("dp").get<std::vector<int>>());
    }
    const auto jb = joint_localization_bound(con.povm, dq, dp, ctx.tol);
    AnalysisOutcome out;
    out.passed = jb.norm <= jb.bound + 1e-10;
    out.result = {{"dq", event_to_json(dq)},
                  {"dp", event_to_json(dp)},
                  {"norm", jb.norm},
                  {"bound", jb.bound},
                  {"mu", jb.mu},
                  {"maximizer", amplitudes_to_json(jb.maximizer)},
                  {"passed", out.passed}};
    return out;
}

AnalysisOutcome run_one(const std::string& name, const RunContext& ctx, const Construction& con) {
    if (name == "validate") return run_validate(ctx, con);
    if (name == "covariance") return run_covariance(ctx, con);
    if (name == "norm1") return run_norm1(ctx, con);
    if (name == "necessary-condition") return run_necessary_condition(ctx, con);
    if (name == "refinement") return run_refinement(ctx, con);
    if (name == "scaling") return run_scaling(ctx, con);
    if (name == "marginals") return run_marginals(ctx, con);
    if (name == "kernel-identity") return run_kernel_identity(ctx, con);
    if (name == "joint-bound") return run_joint_bound(ctx, con);
    throw ConfigError("unknown analysis '" + name + "'");
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_manifest(const RunContext& ctx, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& outputs,
                    const Json& summary, int exit_code) {
    Json m;
    m["schema"] = 1;
    m["version"] = kVersion;
    m["command"] = command;
    m["config_hash"] = config_hash(ctx.config);
    m["created_utc"] = timestamp_utc();
    Json out = Json::object();
    for (const auto& [name, file] : outputs) out[name] = file;
    m["outputs"] = out;
    m["analyses"] = ctx.config.value("analyses", Json::array());
    m["summary"] = summary;
    m["exit_code"] = exit_code;
    write_text_file(ctx.out_dir / "manifest.json", m.dump(2) + "\n");
}

int run_check(const RunContext& ctx, bool construction_only) {
    Construction con = construct(ctx);

    std::vector<std::string> analyses;
    if (construction_only) {
        analyses = {"validate"};
    } else {
        if (!ctx.config.contains("analyses")) throw ConfigError("config is missing \"analyses\"");
        analyses = ctx.config.at("analyses").get<std::vector<std::string>>();
        if (analyses.empty()) throw ConfigError("\"analyses\" must not be empty");
    }

    Json report;
    report["schema"] = 1;
    report["version"] = kVersion;
    report["config_hash"] = config_hash(ctx.config);
    if (ctx.seed) report["seed"] = *ctx.seed;
    report["construction"] = ctx.config.at("construction");

    std::vector<std::pair<std::string, std::string>> outputs;
    Json results = Json::object();
    Json by_analysis = Json::object();
    bool all_passed = true;

    std::vector<Artifact> artifacts;
    for (const auto& name : analyses) {
        AnalysisOutcome outcome = run_one(name, ctx, con);
        all_passed = all_passed && outcome.passed;
        by_analysis[name] = outcome.passed;
        results[name] = std::move(outcome.result);
        for (auto& art : outcome.artifacts) artifacts.push_back(std::move(art));
        if (!ctx.quiet)
            std::cout << (by_analysis[name].get<bool>() ? "[pass] " : "[FAIL] ") << name << '\n';
    }
    report["results"] = results;
    report["summary"] = {{"passed", all_passed}, {"analyses", by_analysis}};

    if (!json_all_finite(report)) {
        std::cerr << "error: report contains non-finite numbers\n";
        return kExitCheckFailed;
    }

    write_text_file(ctx.out_dir / "report.json", report.dump(2) + "\n");
    outputs.push_back({"report", "report.json"});
    const Json povm_json = povm_to_json(con.povm);
    write_text_file(ctx.out_dir / "povm.json", povm_json.dump(2) + "\n");
    outputs.push_back({"povm", "povm.json"});
    for (const auto& art : artifacts) {
        write_text_file(ctx.out_dir / art.filename, art.contents);
        outputs.push_back({art.name, art.filename});
    }

    const int code = all_passed ? kExitPass : kExitCheckFailed;
    write_manifest(ctx, construction_only ? "build" : "check", outputs,
                   report.at("summary"), code);
    if (!ctx.quiet)
        std::cout << (all_passed ? "all checks passed" : "some checks failed") << '\n';
    return code;
}

int run_sweep(const RunContext& ctx) {
    RunContext sweep_ctx = ctx;
    sweep_ctx.config["analyses"] = {"validate", "scaling", "refinement"};
    return run_check(sweep_ctx, false);
}

int run_marginal_cmd(const RunContext& ctx) {
    RunContext m_ctx = ctx;
    m_ctx.config["analyses"] = Json::array({"marginals"});
    const Json& c = ctx.config.at("construction");
    if (c.value("kind", std::string()) == "wh") m_ctx.config["analyses"].push_back("kernel-identity");
    return run_check(m_ctx, false);
}

// ---- report diffing ----------------------------------------------------

struct DiffEntry {
    std::string path;
    std::string a;
    std::string b;
    double delta = 0.0;
};

double tolerance_for(const std::map<std::string, double>& tols, const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string leaf = dot == std::string::npos ? path : path.substr(dot + 1);
    if (auto it = tols.find(leaf); it != tols.end()) return it->second;
    if (auto it = tols.find("default"); it != tols.end()) return it->second;
    return 0.0;
}

void diff_json(const Json& a, const Json& b, const std::string& path,
               const std::map<std::string, double>& tols, std::vector<DiffEntry>& out) {
    if (a.type() != b.type()) {
        out.push_back({path, a.dump(), b.dump(), 0.0});
        return;
    }
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()))
                out.push_back({path + "." + it.key(), it.value().dump(), "<missing>", 0.0});
            else
                diff_json(it.value(), b.at(it.key()), path + "." + it.key(), tols, out);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key()))
                out.push_back({path + "." + it.key(), "<missing>", it.value().dump(), 0.0});
        return;
    }
    if (a.is_array()) {
        const size_t n = std::max(a.size(), b.size());
        for (size_t i = 0; i < n; ++i) {
            const std::string sub = path + "[" + std::to_string(i) + "]";
            if (i >= a.size())
                out.push_back({sub, "<missing>", b[i].dump(), 0.0});
            else if (i >= b.size())
                out.push_back({sub, a[i].dump(), "<missing>", 0.0});
            else
                diff_json(a[i], b[i], sub, tols, out);
        }
        return;
    }
    if (a.is_number() && b.is_number()) {
        const double xa = a.get<double>();
        const double xb = b.get<double>();
        const double delta = std::abs(xa - xb);
        if (delta > tolerance_for(tols, path)) out.push_back({path, a.dump(), b.dump(), delta});
        return;
    }
    if (a != b) out.push_back({path, a.dump(), b.dump(), 0.0});
}

int run_report_diff(const fs::path& dir_a, const fs::path& dir_b,
                    const std::map<std::string, double>& tols, bool quiet) {
    const Json ma = Json::parse(read_text_file(dir_a / "manifest.json"));
    const Json mb = Json::parse(read_text_file(dir_b / "manifest.json"));
    if (ma.value("analyses", Json::array()) != mb.value("analyses", Json::array()) ||
        ma.value("config_hash", std::string()) != mb.value("config_hash", std::string())) {
        std::cerr << "error: manifests describe different selections or configs\n";
        return kExitConfigError;
    }

    std::vector<DiffEntry> diffs;
    for (auto it = ma.at("outputs").begin(); it != ma.at("outputs").end(); ++it) {
        const std::string file = it.value().get<std::string>();
        if (!mb.at("outputs").contains(it.key())) {
            diffs.push_back({it.key(), file, "<missing>", 0.0});
            continue;
        }
        const fs::path pa = dir_a / file;
        const fs::path pb = dir_b / mb.at("outputs").at(it.key()).get<std::string>();
        if (file.size() >= 5 && file.substr(file.size() - 5) == ".json") {
            diff_json(Json::parse(read_text_file(pa)), Json::parse(read_text_file(pb)), it.key(), tols,
                      diffs);
            continue;
        }
        const std::string ca = read_text_file(pa);
        const std::string cb = read_text_file(pb);
        if (ca == cb) continue;
        // Cell-wise numeric compare for CSVs.
        std::istringstream sa(ca), sb(cb);
        std::string la, lb;
        int line = 0;
        while (true) {
            const bool got_a = static_cast<bool>(std::getline(sa, la));
            const bool got_b = static_cast<bool>(std::getline(sb, lb));
            if (!got_a && !got_b) break;
            const std::string where = it.key() + ":" + std::to_string(line);
            if (got_a != got_b) {
                diffs.push_back({where, got_a ? la : "<eof>", got_b ? lb : "<eof>", 0.0});
                break;
            }
            if (la != lb) {
                std::istringstream ca_line(la), cb_line(lb);
                std::string fa, fb;
                int col = 0;
                while (std::getline(ca_line, fa, ',') && std::getline(cb_line, fb, ',')) {
                    if (fa != fb) {
                        const double xa = std::strtod(fa.c_str(), nullptr);
                        const double xb = std::strtod(fb.c_str(), nullptr);
                        const double delta = std::abs(xa - xb);
                        if (delta > tolerance_for(tols, it.key()))
                            diffs.push_back({where + ":" + std::to_string(col), fa, fb, delta});
                    }
                    ++col;
                }
            }
            ++line;
        }
    }

    Json out = Json::array();
    for (const auto& d : diffs)
        out.push_back({{"path", d.path}, {"a", d.a}, {"b", d.b}, {"delta", d.delta}});
    if (!quiet || !diffs.empty()) std::cout << out.dump(2) << '\n';
    return diffs.empty() ? kExitPass : kExitCheckFailed;
}

std::map<std::string, double> parse_tol_flags(const std::vector<std::string>& kvs) {
    std::map<std::string, double> out;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--tol expects KEY=VAL, got '" + kv + "'");
        char* end = nullptr;
        const double v = std::strtod(kv.c_str() + eq + 1, &end);
        if (end == kv.c_str() + eq + 1) throw ConfigError("--tol value is not a number in '" + kv + "'");
        out[kv.substr(0, eq)] = v;
    }
    return out;
}

RunContext make_context(const std::string& config_path, const std::string& out_flag,
                        std::optional<uint64_t> seed_flag, const std::vector<std::string>& tol_flags,
                        bool quiet) {
    RunContext ctx;
    Json config;
    try {
        config = Json::parse(read_text_file(config_path));
    } catch (const Json::parse_error& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (config.value("schema", 0) != 1) throw ConfigError("config needs \"schema\": 1");

    const auto flag_tols = parse_tol_flags(tol_flags);
    Tolerances tol;
    if (config.contains("tolerances"))
        for (auto it = config.at("tolerances").begin(); it != config.at("tolerances").end(); ++it)
            tol.set(it.key(), it.value().get<double>());
    for (const auto& [k, v] : flag_tols) {
        tol.set(k, v);
        config["tolerances"][k] = v;  // overrides participate in the config hash
    }
    ctx.tol = tol;

    if (seed_flag) {
        ctx.seed = seed_flag;
        config["seed"] = *seed_flag;
    } else if (config.contains("seed")) {
        ctx.seed = config.at("seed").get<uint64_t>();
    }

    std::string out_dir = out_flag;
    if (out_dir.empty()) {
        if (const char* env = std::getenv("POVMKIT_OUT_DIR")) out_dir = env;
    }
    if (out_dir.empty()) throw ConfigError("no output directory: pass --out or set POVMKIT_OUT_DIR");
    ctx.out_dir = out_dir;
    fs::create_directories(ctx.out_dir);
    ctx.quiet = quiet;
    ctx.config = std::move(config);
    return ctx;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-space localization observables: constructions, norm analysis, reports"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> tol_flags;
    std::optional<uint64_t> seed;
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag("--quiet", quiet, "suppress progress lines");
        cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out", out_dir, "output directory (default: $POVMKIT_OUT_DIR)");
        cmd->add_option("--seed", seed, "seed override for randomized inputs");
        cmd->add_option("--tol", tol_flags, "tolerance override KEY=VAL (repeatable)");
    };

    CLI::App* build = app.add_subcommand("build", "construct an observable and validate it");
    add_common(build);
    CLI::App* check = app.add_subcommand("check", "run the analyses selected in the config");
    add_common(check);
    CLI::App* sweep = app.add_subcommand("sweep", "grid-refinement family: scaling and continuity");
    add_common(sweep);
    CLI::App* marginal = app.add_subcommand("marginal", "marginal observables and their kernels");
    add_common(marginal);

    CLI::App* diff = app.add_subcommand("report-diff", "field-level diff of two run directories");
    std::string dir_a, dir_b;
    diff->add_option("a", dir_a, "first run directory (holds manifest.json)")->required();
    diff->add_option("b", dir_b, "second run directory")->required();
    diff->add_flag("--quiet", quiet, "only print nonempty diffs");
    diff->add_option("--tol", tol_flags,
                     "numeric tolerance FIELD=VAL (repeatable; 'default' applies to all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (diff->parsed()) return run_report_diff(dir_a, dir_b, parse_tol_flags(tol_flags), quiet);
        RunContext ctx = make_context(config_path, out_dir, seed, tol_flags, quiet);
        if (build->parsed()) return run_check(ctx, true);
        if (check->parsed()) return run_check(ctx, false);
        if (sweep->parsed()) return run_sweep(ctx);
        if (marginal->parsed()) return run_marginal_cmd(ctx);
        std::cerr << "error: no subcommand\n";
        return kExitConfigError;
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfigError;
    } catch (const ConstructionError& err) {
        std::cerr << "construction rejected: " << err.what() << '\n'
                  << Json({{"defect", err.defect()},
                           {"threshold", err.threshold()},
                           {"suggestion", err.suggestion()}})
                         .dump(2)
                  << '\n';
        return kExitCheckFailed;
    } catch (const Json::exception& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitCheckFailed;
    }
}
