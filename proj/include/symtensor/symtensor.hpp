#pragma once

#include <algorithm>
#include <tuple>

#include "symtensor/norms.hpp"
#include "symtensor/optimize.hpp"

namespace symtensor {

/// One rank-one summand lambda * x^{(x)n}.
struct Term {
    Scalar coeff{0.0, 0.0};
    Vector vec;

    friend bool operator==(const Term&, const Term&) = default;
};

/// Degree-n symmetric tensor sum_j lambda_j x_j (x) ... (x) x_j, stored as
/// its rank-one combination; the empty term list is the zero tensor.
struct SymTensor {
    int degree = 1;
    Space ambient;
    std::vector<Term> terms;

    SymTensor(int n, Space amb, std::vector<Term> t)
        : degree(n), ambient(std::move(amb)), terms(std::move(t)) {
        if (degree < 1) throw InputError("tensor degree must be at least 1");
        for (const auto& term : terms) check_dim(ambient, term.vec.size(), "tensor term");
    }
};

inline Scalar power_int(Scalar z, int n) {
    Scalar r(1.0, 0.0);
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

/// eval(t, phi) = sum_j lambda_j <phi, x_j>^n; the zero tensor gives 0.
inline Scalar eval(const SymTensor& t, const Functional& phi) {
    check_dim(t.ambient, phi.size(), "eval");
    Scalar s(0.0, 0.0);
    for (const auto& term : t.terms) s += term.coeff * power_int(pair(phi, term.vec), t.degree);
    return s;
}

inline SymTensor add(const SymTensor& a, const SymTensor& b) {
    if (a.degree != b.degree) throw InputError("add: tensor degrees differ");
    if (!(a.ambient == b.ambient)) throw InputError("add: ambient spaces differ");
    std::vector<Term> terms = a.terms;
    terms.insert(terms.end(), b.terms.begin(), b.terms.end());
    return SymTensor(a.degree, a.ambient, std::move(terms));
}

inline SymTensor scale(const SymTensor& t, Scalar s) {
    std::vector<Term> terms = t.terms;
    for (auto& term : terms) term.coeff *= s;
    return SymTensor(t.degree, t.ambient, std::move(terms));
}

/// sup over |zeta| = 1 of |a + zeta b|: |a| + |b| over C, and the same
/// value as max(|a+b|, |a-b|) over R.
inline double sup_over_unimodular(Scalar a, Scalar b, Field field) {
    if (field == Field::Complex) return std::abs(a) + std::abs(b);
    return std::max(std::abs(a + b), std::abs(a - b));
}

namespace detail {

inline bool scalar_less(Scalar a, Scalar b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline bool term_less(const Term& a, const Term& b) {
    if (a.coeff != b.coeff) return scalar_less(a.coeff, b.coeff);
    const std::size_t n = std::min(a.vec.size(), b.vec.size());
    for (std::size_t k = 0; k < n; ++k)
        if (a.vec[k] != b.vec[k]) return scalar_less(a.vec[k], b.vec[k]);
    return a.vec.size() < b.vec.size();
}

}  // namespace detail

/// Terms in the canonical order (coefficient, then coordinates), so results
/// do not depend on how the term list was assembled.
inline SymTensor canonical(const SymTensor& t) {
    std::vector<Term> terms = t.terms;
    std::stable_sort(terms.begin(), terms.end(), detail::term_less);
    return SymTensor(t.degree, t.ambient, std::move(terms));
}

/// The injective-norm maximand |eval(t, .)| with its certificate bounds.
inline Objective tensor_objective(const SymTensor& t) {
    Objective obj;
    const int n = t.degree;
    const Field field = t.ambient.field();
    const std::vector<Term> terms = t.terms;

    obj.evaluate = [terms, n](const Functional& phi) {
        Scalar s(0.0, 0.0);
        for (const auto& term : terms) {
            Scalar p(0.0, 0.0);
            for (std::size_t k = 0; k < phi.size(); ++k) p += phi[k] * term.vec[k];
            s += term.coeff * power_int(p, n);
        }
        return s;
    };
    obj.gradient = [terms, n, field](const Functional& phi) {
        const int mult = field_multiplicity(field);
        std::vector<Scalar> g(phi.size() * static_cast<std::size_t>(mult), Scalar(0.0, 0.0));
        for (const auto& term : terms) {
            const Scalar p = pair(phi, term.vec);
            const Scalar w = term.coeff * static_cast<double>(n) * power_int(p, n - 1);
            for (std::size_t k = 0; k < phi.size(); ++k) {
                const Scalar dk = w * term.vec[k];
                if (field == Field::Complex) {
                    g[2 * k] += dk;
                    g[2 * k + 1] += Scalar(0.0, 1.0) * dk;
                } else {
                    g[k] += dk;
                }
            }
        }
        return g;
    };

    double lip = 0.0, hess_f = 0.0, value = 0.0;
    for (const auto& term : t.terms) {
        const double an = norm(t.ambient, term.vec);  // |<phi, x>| <= an on the dual ball
        const double e2 = euclid_norm(term.vec.coords);
        const double ac = std::abs(term.coeff);
        lip += ac * static_cast<double>(n) * std::pow(an, n - 1) * e2;
        value += ac * std::pow(an, n);
        if (n >= 2) hess_f += ac * static_cast<double>(n) * static_cast<double>(n - 1) *
                              std::pow(an, n - 2) * e2 * e2;
    }
    obj.lipschitz_bound = lip;
    obj.value_bound = value;
    obj.hess_abs_sq_bound = 2.0 * (lip * lip + value * hess_f);
    obj.homogeneity = n;
    obj.phase_invariant = true;
    for (const auto& term : t.terms)
        obj.hint_starts.push_back(norming_functional(t.ambient, term.vec));

    // sup over the box <= |f(center)| + sum_j |lambda_j| ((|p_j|+w_j)^n - |p_j|^n):
    // keeping the evaluated center preserves cancellation between terms,
    // which is what makes the bound bite near the maximizer.
    obj.box_bound = [terms, n, field](const Functional& c, std::span<const double> rad) {
        Scalar fc(0.0, 0.0);
        double spread = 0.0;
        for (const auto& term : terms) {
            Scalar pc(0.0, 0.0);
            double w = 0.0;
            for (std::size_t k = 0; k < c.size(); ++k) {
                pc += c[k] * term.vec[k];
                const double rk = field == Field::Complex
                                      ? std::hypot(rad[2 * k], rad[2 * k + 1])
                                      : std::abs(rad[k]);
                w += std::abs(term.vec[k]) * rk;
            }
            fc += term.coeff * power_int(pc, n);
            const double a = std::abs(pc);
            spread += std::abs(term.coeff) * (std::pow(a + w, n) - std::pow(a, n));
        }
        return std::abs(fc) + spread;
    };
    return obj;
}

struct InjectiveNormOptions {
    MaximizeOptions opt{};
    bool certify = false;
    double grid_delta = 0.0;     // 0: choose so the certified width is <= grid_width
    double grid_width = 1e-3;
};

/// Injective norm sup{ |eval(t, phi)| : dual_norm(phi) <= 1 }.  The lower
/// bound and maximizer come from the multi-start ascent; with `certify` a
/// grid certificate supplies the upper bound.
inline NormResult injective_norm(const SymTensor& t, const InjectiveNormOptions& opts = {}) {
    const SymTensor ts = canonical(t);
    bool vanishes = true;
    for (const auto& term : ts.terms)
        if (term.coeff != Scalar(0.0, 0.0)) vanishes = false;
    if (vanishes) {
        NormResult res;
        res.lower = 0.0;
        res.maximizer.coords.assign(static_cast<std::size_t>(ts.ambient.dim()), Scalar(0.0, 0.0));
        res.upper = 0.0;
        res.starts_used = 0;
        res.method = "zero-tensor";
        return res;
    }
    Objective obj = tensor_objective(ts);
    SearchDomain dom{ts.ambient};
    NormResult res = maximize(obj, dom, opts.opt);
    if (opts.certify) {
        const int dim_eff = ts.ambient.dim() * field_multiplicity(ts.ambient.field());
        double delta = opts.grid_delta;
        if (delta <= 0.0)
            delta = opts.grid_width /
                    (obj.lipschitz_bound * std::sqrt(static_cast<double>(dim_eff)));
        const CertifiedInterval iv = certified_grid(obj, dom, delta);
        res.upper = iv.upper;
        res.method += "+grid";
    }
    return res;
}

}  // namespace symtensor
