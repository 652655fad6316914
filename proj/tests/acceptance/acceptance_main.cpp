// End-to-end acceptance suite. Each numbered criterion prints one PASS/FAIL
// line; the binary exits nonzero if any criterion fails. Criteria 8 and 9
// assert contrast claims that the exact finite-dimensional computation
// refutes; they are kept as stated and report their counterexamples instead
// of being weakened to pass.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "povmkit/analysis.hpp"
#include "povmkit/marginals.hpp"
#include "povmkit/rng.hpp"
#include "povmkit/serialize.hpp"

namespace fs = std::filesystem;
using namespace povmkit;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& name, bool passed, const std::string& detail) {
    std::printf("[%s] %2d %-28s %s\n", passed ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    if (!passed) ++g_failures;
}

void info(const std::string& text) {
    std::printf("       - %s\n", text.c_str());
}

std::string fmt(const char* f, ...) {
    va_list args;
    va_start(args, f);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
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

// 1. Constructed observables satisfy the measure axioms: positive atoms and
//    an exact resolution of the identity, across dimensions and fiducials.
void criterion_axioms() {
    const auto start = Clock::now();
    Rng rng(1001);
    double worst_defect = 0.0;
    double worst_min_eig = 0.0;
    bool atoms_ok = true;
    for (int d = 2; d <= 64; ++d) {
        const WeylSystem sys(d);
        for (int rep = 0; rep < 20; ++rep) {
            const auto povm =
                build_wh_povm(sys, FiducialVector::custom(StateVector(rng.unit_vector(d))));
            const auto val = validate_povm(povm);
            atoms_ok = atoms_ok && val.atoms_ok;
            worst_defect = std::max(worst_defect, val.normalization_defect);
            for (const auto& row : val.atoms) worst_min_eig = std::min(worst_min_eig, row.min_eig);
        }
    }
    const double elapsed = seconds_since(start);
    const bool passed = atoms_ok && worst_min_eig >= -1e-10 && worst_defect <= 1e-10 && elapsed < 60.0;
    report(1, "povm-axioms", passed,
           fmt("d=2..64, 20 fiducials each: worst defect %.2e, worst min eig %.2e, %.1f s",
               worst_defect, worst_min_eig, elapsed));
}

// 2. Covariance under every lattice displacement, exhaustively for d <= 8.
void criterion_covariance() {
    Rng rng(1002);
    double worst = 0.0;
    for (int d = 2; d <= 8; ++d) {
        const WeylSystem sys(d);
        std::vector<FiducialVector> etas;
        etas.push_back(FiducialVector::basis(d, 0));
        etas.push_back(FiducialVector::uniform(d));
        etas.push_back(FiducialVector::gaussian_lattice(d, 1.0));
        etas.push_back(FiducialVector::custom(StateVector(rng.unit_vector(d))));
        etas.push_back(FiducialVector::custom(StateVector(rng.unit_vector(d))));
        for (const auto& eta : etas) {
            const auto povm = build_wh_povm(sys, eta);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    worst = std::max(worst, covariance_check(povm, sys, a, b));
        }
    }
    report(2, "covariance", worst <= 1e-10,
           fmt("exhaustive shifts, d=2..8, 5 fiducials each: worst deviation %.2e", worst));
}

// 3. The sharp observable carries norm one on every nonzero event.
void criterion_pvm_norm1() {
    const auto pvm = make_sharp_position_pvm(4);
    const auto events = analysis_events(pvm.space(), 0);
    bool ok = events.size() == 16;
    double worst_gap = 0.0;
    for (const auto& ev : events) {
        const double norm = spectral_norm(effect_of(pvm, ev));
        if (ev.empty()) {
            ok = ok && norm == 0.0;
        } else {
            worst_gap = std::max(worst_gap, std::abs(1.0 - norm));
        }
    }
    ok = ok && worst_gap <= 1e-10;
    report(3, "pvm-norm-1", ok,
           fmt("sharp d=4, all 16 events: worst |1-norm| %.2e, empty event norm 0", worst_gap));
}

// 4. Phase-space cells can never carry norm one: every cell norm is capped by
//    the cell measure, and the cap scales linearly as cells shrink.
void criterion_nogo_scaling() {
    const double cap = 0.1 * 0.1 / std::numbers::pi;
    const auto povm =
        build_coherent_povm(CoherentGrid::make(24, 4.0, 0.1), FiducialVector::basis(24, 0), {}, 1.0);
    double worst_cell = 0.0;
    for (int i = 0; i < povm.atom_count(); ++i)
        worst_cell = std::max(worst_cell, spectral_norm(povm.atom_effect(i)));

    const auto family =
        build_coherent_family(CoherentGrid::make(24, 4.0, 0.4), FiducialVector::basis(24, 0), 4, {}, 1.0);
    const auto fit = cell_shrink_scaling(family);

    const bool passed = worst_cell <= cap + 1e-12 && worst_cell < 1.0 && fit.slope >= 0.9 &&
                        fit.slope <= 1.1;
    report(4, "phase-space-no-go", passed,
           fmt("N=24 L=4 h=0.1 (defect %.3f recorded): worst cell norm %.6e <= h^2/pi %.6e; "
               "slope %.6f over h=0.4..0.05",
               povm.normalization_defect(), worst_cell, cap, fit.slope));
}

// 5. Event norms are dominated by the certificate c * mu(event) on both
//    constructions.
void criterion_absolute_continuity() {
    Rng fid(1005);
    const auto wh = build_wh_povm(WeylSystem(8), FiducialVector::custom(StateVector(fid.unit_vector(8))));
    const auto coh =
        build_coherent_povm(CoherentGrid::make(24, 4.0, 0.1), FiducialVector::basis(24, 0), {}, 1.0);

    bool ok = true;
    std::string detail;
    for (const auto* entry : {&wh, &coh}) {
        const auto ac = absolute_continuity_constant(*entry);
        ok = ok && ac.finite;
        Rng events(1006);
        double worst_excess = -1e300;
        for (int k = 0; k < 200; ++k) {
            const EventSet ev = events.event(entry->atom_count());
            const double norm = spectral_norm(effect_of(*entry, ev));
            const double mu = entry->space().weight_sum(ev.indices());
            worst_excess = std::max(worst_excess, norm - (ac.c * mu + 1e-10));
        }
        ok = ok && worst_excess <= 0.0;
        if (entry == &wh) {
            ok = ok && std::abs(ac.c - 1.0) <= 1e-12;
            detail += fmt("wh d=8: c=%.12f worst excess %.2e; ", ac.c, worst_excess);
        } else {
            ok = ok && ac.c <= 1.0 + 1e-10;
            detail += fmt("coherent: c=%.12f worst excess %.2e", ac.c, worst_excess);
        }
    }
    report(5, "absolute-continuity", ok, "200 seeded events each: " + detail);
}

// 6. Refinement sequences are uniformly dominated by c * mu at every level.
void criterion_uniform_continuity() {
    const FiducialVector vac = FiducialVector::basis(24, 0);
    const auto family = build_coherent_family(CoherentGrid::make(24, 4.0, 0.4), vac, 4, {}, 1.0);

    // Cells shrinking to a point across the nested grids.
    std::vector<EventSet> cells;
    for (const auto& level : family) cells.push_back(EventSet::single(nearest_origin_cell(level.space())));
    const auto shrink = refinement_check_family(family, cells);

    // Increasing exhaustion and decreasing tails on the h=0.1 grid.
    const DiscretePOVM& povm = family[2];
    const int n = povm.atom_count();
    RefinementSequence up;
    up.direction = RefinementDirection::IncreasingToEvent;
    up.limit = EventSet::full(n);
    RefinementSequence down;
    down.direction = RefinementDirection::DecreasingToEmpty;
    for (int size : {1, n / 64, n / 16, n / 4, n / 2, n}) {
        std::vector<int> head(static_cast<size_t>(size));
        for (int i = 0; i < size; ++i) head[static_cast<size_t>(i)] = i;
        up.events.emplace_back(std::move(head));
        std::vector<int> tail(static_cast<size_t>(n - size));
        for (int i = size; i < n; ++i) tail[static_cast<size_t>(i - size)] = i;
        down.events.emplace_back(std::move(tail));
    }
    const auto up_rep = refinement_check(povm, up);
    const auto down_rep = refinement_check(povm, down);

    const bool final_ok = up_rep.final_identity_gap <= povm.normalization_defect() + 1e-10;
    const bool passed =
        shrink.all_dominated && up_rep.all_dominated && down_rep.all_dominated && final_ok;
    report(6, "uniform-continuity", passed,
           fmt("shrinking cells, increasing and decreasing sequences all dominated by c*mu+1e-10; "
               "final identity gap %.6f <= defect %.6f + 1e-10",
               up_rep.final_identity_gap, povm.normalization_defect()));
}

// Independent oracle: the marginal atom by naive double summation over the
// column, with displacements built from repeated matrix products.
Matrix oracle_marginal_atom(int d, int q, const Vector& eta) {
    Matrix x = Matrix::Zero(d, d);
    Matrix z = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) {
        x((j + 1) % d, j) = Complex(1.0, 0.0);
        z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
    }
    Matrix acc = Matrix::Zero(d, d);
    for (int p = 0; p < d; ++p) {
        Matrix disp = Matrix::Identity(d, d);
        for (int k = 0; k < q; ++k) disp = x * disp;
        for (int k = 0; k < p; ++k) disp = disp * z;
        const Vector v = disp * eta;
        acc += (1.0 / d) * v * v.adjoint();
    }
    return acc;
}

// 7. The position marginal equals the kernel smearing of the sharp observable,
//    and both agree with a naive double-summation oracle.
void criterion_kernel_identity() {
    Rng rng(1007);
    double worst_dev = 0.0;
    double worst_row = 0.0;
    double worst_oracle = 0.0;
    bool extraction_ok = true;
    for (int d : {2, 4, 8}) {
        for (int rep = 0; rep < 10; ++rep) {
            const FiducialVector eta = FiducialVector::custom(StateVector(rng.unit_vector(d)));
            worst_dev = std::max(worst_dev, marginal_kernel_identity_check(d, eta));
            const auto mq = marginal_q(build_wh_povm(WeylSystem(d), eta));
            for (int q = 0; q < d; ++q) {
                const Matrix oracle = oracle_marginal_atom(d, q, eta.state.amplitudes());
                worst_oracle = std::max(
                    worst_oracle, (mq.atom_effect(q).to_dense() - oracle).cwiseAbs().maxCoeff());
            }
            const auto ex = extract_kernel(mq, computational_basis(d));
            extraction_ok = extraction_ok && ex.ok;
            worst_row = std::max(worst_row, ex.worst_row_dev);
        }
    }
    const bool passed =
        worst_dev <= 1e-10 && worst_oracle <= 1e-10 && extraction_ok && worst_row <= 1e-10;
    report(7, "marginal-kernel-identity", passed,
           fmt("d=2,4,8 x 10 fiducials: worst smearing dev %.2e, worst oracle dev %.2e, "
               "worst kernel row dev %.2e",
               worst_dev, worst_oracle, worst_row));
}

// 8. Claimed contrast: at d=2 the full observable built on (|0>+|1>)/sqrt(2)
//    fails commutativity with witness >= 0.1 while its position marginal is
//    commutative. The second half holds; the first half cannot: X and Z map
//    |+> onto {|+>, |->} up to phase, an orthogonal and therefore commuting
//    pair of projectors. The criterion is asserted as stated and the
//    counterexample is reported rather than repaired.
void criterion_commutativity_contrast() {
    const WeylSystem sys(2);
    const auto joint = build_wh_povm(sys, FiducialVector::uniform(2));
    const auto parent = is_commutative(joint, 1e-12);
    const auto marg = is_commutative(marginal_q(joint), 1e-12);

    const bool claimed = !parent.commutative && parent.worst_norm >= 0.1 && marg.commutative;
    report(8, "commutativity-contrast", claimed,
           fmt("eta=|+>, d=2: parent worst commutator %.3e (claimed >= 0.1), marginal commutative: %s",
               parent.worst_norm, marg.commutative ? "yes" : "no"));
    if (!claimed) {
        info("the displacement orbit of |+> is {|+>, |->}: orthogonal projectors commute, so no");
        info("witness can exist at this fiducial; the contrast is real at generic fiducials:");
        Vector eta(2);
        eta << std::cos(std::numbers::pi / 6.0), std::sin(std::numbers::pi / 6.0);
        const auto generic = build_wh_povm(sys, FiducialVector::custom(StateVector(eta)));
        const auto gp = is_commutative(generic, 1e-12);
        const auto gm = is_commutative(marginal_q(generic), 1e-12);
        info(fmt("eta=cos(pi/6)|0>+sin(pi/6)|1>: parent worst commutator %.6f >= 0.1, marginal "
                 "commutative: %s",
                 gp.worst_norm, gm.commutative ? "yes" : "no"));
    }
}

// 9. Claimed margin: for every full-support fiducial the position-marginal
//    singletons stay below 1 - 1/(2d). The singleton norm equals
//    max_j |eta_j|^2, which approaches 1 for fiducials concentrated near a
//    basis vector, so no such uniform margin exists. The criterion is
//    asserted over a natural full-support family and its counterexamples are
//    reported; the true (margin-free) statement norm < 1 is checked alongside.
void criterion_marginal_norm1_margin() {
    Rng rng(1009);
    bool margin_ok = true;
    bool strict_ok = true;
    bool formula_ok = true;
    std::string witness;
    for (int d : {2, 3, 4}) {
        const double margin = 1.0 - 1.0 / (2.0 * d);
        std::vector<std::pair<std::string, FiducialVector>> family;
        family.push_back({"uniform", FiducialVector::uniform(d)});
        for (double w : {0.25, 0.5, 1.0, 2.0})
            family.push_back({fmt("gaussian(%.2f)", w), FiducialVector::gaussian_lattice(d, w)});
        for (int rep = 0; rep < 10; ++rep)
            family.push_back({fmt("haar#%d", rep),
                              FiducialVector::custom(StateVector(rng.full_support_unit_vector(d)))});

        for (const auto& [label, eta] : family) {
            const auto mq = marginal_q(build_wh_povm(WeylSystem(d), eta));
            // Kernel-max formula: every singleton norm equals max_j |eta_j|^2.
            double kernel_max = 0.0;
            for (int j = 0; j < d; ++j) kernel_max = std::max(kernel_max, std::norm(eta.state.amplitudes()[j]));
            for (int q = 0; q < d; ++q) {
                const double norm = spectral_norm(mq.atom_effect(q));
                formula_ok = formula_ok && std::abs(norm - kernel_max) <= 1e-12;
                strict_ok = strict_ok && norm < 1.0;
                if (norm >= margin && margin_ok) {
                    margin_ok = false;
                    witness = fmt("d=%d %s: singleton norm %.6f >= 1 - 1/(2d) = %.6f", d,
                                  label.c_str(), norm, margin);
                }
            }
        }
    }
    report(9, "marginal-norm-1-margin", margin_ok && formula_ok,
           margin_ok ? "all tested full-support fiducials stay below 1 - 1/(2d)"
                     : "margin violated: " + witness);
    if (!margin_ok) {
        info(fmt("singleton norms equal max_j |eta_j|^2 (kernel-max formula verified to 1e-12: %s),",
                 formula_ok ? "yes" : "NO"));
        info(fmt("so near-basis full-support fiducials push them arbitrarily close to 1;"));
        info(fmt("the margin-free statement 'every singleton norm < 1' held for all tested: %s",
                 strict_ok ? "yes" : "NO"));
    }
}

// 10. Two identical seeded runs of the command line produce byte-identical
//     reports.
void criterion_determinism() {
    using Json = nlohmann::json;
    const fs::path dir = fs::temp_directory_path() / "povmkit_acceptance" / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const Json wh_config = {
        {"schema", 1},
        {"construction", {{"kind", "wh"}, {"d", 4}, {"fiducial", {{"label", "random"}}}}},
        {"analyses",
         {"validate", "covariance", "norm1", "necessary-condition", "refinement", "marginals",
          "kernel-identity", "joint-bound"}},
        {"seed", 20250810}};
    std::ofstream(dir / "wh.json") << wh_config.dump(2);
    const Json sweep_config = {{"schema", 1},
                               {"construction",
                                {{"kind", "coherent"},
                                 {"N", 8},
                                 {"L", 3.5},
                                 {"h", 0.7},
                                 {"fiducial", {{"label", "basis"}, {"index", 0}}},
                                 {"thresholds", {{"normalization", 1.0}}}}},
                               {"sweep", {{"levels", 3}}},
                               {"seed", 20250810}};
    std::ofstream(dir / "sweep.json") << sweep_config.dump(2);

    auto run = [&](const std::string& verb, const std::string& cfg, const std::string& out) {
        const std::string cmd = std::string(POVMKIT_CLI_PATH) + " " + verb + " --config " +
                                (dir / cfg).string() + " --quiet --out " + (dir / out).string() +
                                " >/dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    bool ok = true;
    int compared = 0;
    for (const auto& [verb, cfg, pair_name] :
         {std::tuple{"check", "wh.json", "wh"}, std::tuple{"sweep", "sweep.json", "sw"}}) {
        const std::string out_a = std::string(pair_name) + "_a";
        const std::string out_b = std::string(pair_name) + "_b";
        ok = ok && run(verb, cfg, out_a) == run(verb, cfg, out_b);
        if (!fs::exists(dir / out_a / "manifest.json")) {
            ok = false;
            continue;
        }
        const Json manifest = Json::parse(slurp(dir / out_a / "manifest.json"));
        for (auto it = manifest.at("outputs").begin(); it != manifest.at("outputs").end(); ++it) {
            const std::string file = it.value().get<std::string>();
            ok = ok && slurp(dir / out_a / file) == slurp(dir / out_b / file);
            ++compared;
        }
    }
    report(10, "determinism", ok && compared > 0,
           fmt("two seeded runs of check and sweep: %d artifacts byte-identical", compared));
}

}  // namespace

int main() {
    std::printf("acceptance suite (povmkit)\n");
    const auto start = Clock::now();
    criterion_axioms();
    criterion_covariance();
    criterion_pvm_norm1();
    criterion_nogo_scaling();
    criterion_absolute_continuity();
    criterion_uniform_continuity();
    criterion_kernel_identity();
    criterion_commutativity_contrast();
    criterion_marginal_norm1_margin();
    criterion_determinism();
    std::printf("RESULT: %d/10 criteria passed (%.1f s)\n", 10 - g_failures, seconds_since(start));
    if (g_failures > 0)
        std::printf("criteria 8 and 9 assert claims refuted by exact computation; see the lines "
                    "above for the counterexamples.\n");
    return g_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
