#include "povmkit/povm.hpp"

#include <algorithm>
#include <cmath>

namespace povmkit {

namespace {

// Balanced ascending-index tree over the selected atoms; the fixed reduction
// order keeps recorded defects reproducible. One workspace matrix per tree
// level instead of one per node.
void tree_sum_into(const std::vector<const Effect*>& atoms, size_t lo, size_t hi, Matrix& out,
                   std::vector<Matrix>& pool, size_t depth) {
    if (hi - lo == 1) {
        atoms[lo]->write_dense_into(out);
        return;
    }
    const size_t mid = lo + (hi - lo) / 2;
    tree_sum_into(atoms, lo, mid, out, pool, depth + 1);
    Matrix& tmp = pool[depth];
    tree_sum_into(atoms, mid, hi, tmp, pool, depth + 1);
    out += tmp;
}

Matrix tree_sum_dense(const std::vector<const Effect*>& atoms, size_t lo, size_t hi) {
    Matrix out;
    size_t levels = 1;
    while ((size_t{1} << levels) < hi - lo) ++levels;
    std::vector<Matrix> pool(levels + 1);
    tree_sum_into(atoms, lo, hi, out, pool, 0);
    return out;
}

double tree_sum_scalar(const std::vector<double>& xs) { return tree_sum(xs); }

double effect_norm(const Effect& e) { return spectral_norm(e); }

}  // namespace

DiscretePOVM DiscretePOVM::assemble(OutcomeSpace space, int dim, std::vector<Effect> atom_effects,
                                    const Tolerances& tol, std::optional<double> recorded_threshold) {
    const HilbertSpace hilbert(dim);  // validates dim >= 1
    if (static_cast<int>(atom_effects.size()) != space.size())
        throw std::invalid_argument("DiscretePOVM: one effect per atom required");
    for (const auto& e : atom_effects)
        if (e.dim() != dim) throw std::invalid_argument("DiscretePOVM: effect dimension mismatch");

    DiscretePOVM p;
    p.dim_ = hilbert.dim();
    std::vector<const Effect*> ptrs;
    ptrs.reserve(atom_effects.size());
    for (const auto& e : atom_effects) ptrs.push_back(&e);
    p.total_ = tree_sum_dense(ptrs, 0, ptrs.size());
    p.defect_ = hermitian_operator_norm(p.total_ - Matrix::Identity(dim, dim));
    p.threshold_ = recorded_threshold.value_or(tol.norm_exact);
    p.space_ = std::move(space);
    p.effects_ = std::move(atom_effects);
    return p;
}

DiscretePOVM DiscretePOVM::admit(OutcomeSpace space, int dim, std::vector<Effect> atom_effects,
                                 double defect_threshold, const Tolerances& tol,
                                 const std::string& suggestion) {
    DiscretePOVM p = assemble(std::move(space), dim, std::move(atom_effects), tol);
    p.threshold_ = defect_threshold;
    if (p.defect_ > defect_threshold) {
        std::string msg = "construction rejected: normalization defect " + std::to_string(p.defect_) +
                          " exceeds threshold " + std::to_string(defect_threshold);
        if (!suggestion.empty()) msg += "; " + suggestion;
        throw ConstructionError(msg, p.defect_, defect_threshold, suggestion);
    }
    return p;
}

const Effect& DiscretePOVM::atom_effect(int i) const {
    if (i < 0 || i >= atom_count())
        throw std::invalid_argument("DiscretePOVM::atom_effect: index out of range");
    return effects_[static_cast<size_t>(i)];
}

Effect effect_of(const DiscretePOVM& povm, const EventSet& event, const Tolerances& tol) {
    if (event.empty()) return Effect::zero(povm.dim());
    std::vector<const Effect*> sel;
    sel.reserve(event.indices().size());
    for (int i : event.indices()) {
        if (i >= povm.atom_count())
            throw std::invalid_argument("effect_of: atom index out of range");
        sel.push_back(&povm.atom_effect(i));
    }
    if (sel.size() == 1 && sel.front()->rank_one_form()) {
        return Effect::rank_one(sel.front()->weight(), sel.front()->vector());
    }
    return Effect::from_matrix(tree_sum_dense(sel, 0, sel.size()), tol);
}

ValidationReport validate_povm(const DiscretePOVM& povm, const Tolerances& tol) {
    ValidationReport rep;
    rep.normalization_defect = povm.normalization_defect();
    rep.defect_threshold = povm.defect_threshold();
    rep.defect_ok = rep.normalization_defect <= rep.defect_threshold;
    rep.atoms_ok = true;
    rep.atoms.reserve(static_cast<size_t>(povm.atom_count()));
    for (int i = 0; i < povm.atom_count(); ++i) {
        const Effect& e = povm.atom_effect(i);
        ValidationAtomRow row;
        row.index = i;
        row.min_eig = e.min_eig();
        row.norm = e.max_eig();
        row.positive = row.min_eig >= -tol.positivity;
        row.bounded = row.norm <= 1.0 + tol.positivity;
        rep.atoms_ok = rep.atoms_ok && row.positive && row.bounded;
        rep.atoms.push_back(row);
    }
    rep.passed = rep.atoms_ok && rep.defect_ok;
    return rep;
}

CommutativityResult is_commutative(const DiscretePOVM& povm, double tol) {
    CommutativityResult res;
    for (int i = 0; i < povm.atom_count(); ++i) {
        for (int j = i + 1; j < povm.atom_count(); ++j) {
            const double n = commutator_norm(povm.atom_effect(i), povm.atom_effect(j));
            if (n > res.worst_norm) {
                res.worst_norm = n;
                res.atom_a = i;
                res.atom_b = j;
            }
        }
    }
    res.commutative = res.worst_norm <= tol;
    return res;
}

ProjectivityResult is_projective(const DiscretePOVM& povm, double tol) {
    ProjectivityResult res;
    auto note = [&res](double v, int a, int b) {
        if (v > res.worst_violation) {
            res.worst_violation = v;
            res.atom_a = a;
            res.atom_b = b;
        }
    };
    for (int i = 0; i < povm.atom_count(); ++i) {
        const Effect& a = povm.atom_effect(i);
        // Idempotence: || F^2 - F ||; for w |v><v| this is |w^2 ||v||^2 - w| ||v||^2.
        if (a.rank_one_form()) {
            const double vn2 = a.vector().squaredNorm();
            note(std::abs(a.weight() * a.weight() * vn2 - a.weight()) * vn2, i, i);
        } else {
            const Matrix m = a.to_dense();
            note(hermitian_operator_norm(m * m - m), i, i);
        }
        for (int j = i + 1; j < povm.atom_count(); ++j) {
            const Effect& b = povm.atom_effect(j);
            if (a.rank_one_form() && b.rank_one_form()) {
                const double v = std::abs(a.weight() * b.weight()) * std::abs(a.vector().dot(b.vector())) *
                                 a.vector().norm() * b.vector().norm();
                note(v, i, j);
            } else {
                note(operator_norm(a.to_dense() * b.to_dense()), i, j);
            }
        }
    }
    res.projective = res.worst_violation <= tol;
    return res;
}

EventSet spectrum_support(const DiscretePOVM& povm, double tol) {
    std::vector<int> atoms;
    for (int i = 0; i < povm.atom_count(); ++i)
        if (effect_norm(povm.atom_effect(i)) > tol) atoms.push_back(i);
    return EventSet(std::move(atoms));
}

OutcomeProbability outcome_probability(const DiscretePOVM& povm, const StateVector& psi,
                                       const EventSet& event, const Tolerances& tol) {
    if (psi.dim() != povm.dim())
        throw std::invalid_argument("outcome_probability: state dimension mismatch");
    std::vector<double> terms;
    terms.reserve(event.indices().size());
    for (int i : event.indices()) {
        if (i >= povm.atom_count())
            throw std::invalid_argument("outcome_probability: atom index out of range");
        terms.push_back(povm.atom_effect(i).quadratic_form(psi.amplitudes()));
    }
    OutcomeProbability out;
    out.raw = tree_sum_scalar(terms);
    out.in_range = out.raw >= -tol.positivity && out.raw <= 1.0 + tol.positivity;
    out.value = std::clamp(out.raw, 0.0, 1.0);
    return out;
}

DiscretePOVM make_sharp_position_pvm(int d, const Tolerances& tol) {
    if (d < 1) throw std::invalid_argument("make_sharp_position_pvm: d must be >= 1");
    std::vector<double> coords(static_cast<size_t>(d));
    std::vector<double> weights(static_cast<size_t>(d), 1.0);
    for (int j = 0; j < d; ++j) coords[static_cast<size_t>(j)] = j;
    OutcomeSpace space = OutcomeSpace::line(std::move(coords), std::move(weights),
                                            {MeasureKind::CountingNormalized, static_cast<double>(d), false});
    std::vector<Effect> effects;
    effects.reserve(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) {
        Vector v = Vector::Zero(d);
        v[j] = Complex(1.0, 0.0);
        effects.push_back(Effect::rank_one(1.0, std::move(v)));
    }
    return DiscretePOVM::admit(std::move(space), d, std::move(effects), tol.norm_exact, tol);
}

}  // namespace povmkit
