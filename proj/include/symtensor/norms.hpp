#pragma once

#include <optional>

#include "symtensor/optimize.hpp"

namespace symtensor {

/// |<phi0, x>| as an objective over vectors x (the coordinates ride in the
/// optimizer's Functional container).
inline Objective pairing_objective(const Functional& phi0, Field field) {
    Objective obj;
    const std::vector<Scalar> w = phi0.coords;
    obj.evaluate = [w](const Functional& x) {
        Scalar s(0.0, 0.0);
        for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * x[k];
        return s;
    };
    obj.gradient = [w, field](const Functional& x) {
        (void)x;
        std::vector<Scalar> g;
        if (field == Field::Complex) {
            g.resize(2 * w.size());
            for (std::size_t k = 0; k < w.size(); ++k) {
                g[2 * k] = w[k];
                g[2 * k + 1] = Scalar(0.0, 1.0) * w[k];
            }
        } else {
            g = w;
        }
        return g;
    };
    double l2 = euclid_norm(phi0.coords);
    obj.lipschitz_bound = l2;
    obj.hess_abs_sq_bound = 2.0 * l2 * l2;
    obj.homogeneity = 1;
    obj.phase_invariant = true;
    obj.box_bound = [w, field](const Functional& c, std::span<const double> rad) {
        Scalar pc(0.0, 0.0);
        double slack = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            pc += w[k] * c[k];
            const double rk = field == Field::Complex
                                  ? std::hypot(rad[2 * k], rad[2 * k + 1])
                                  : std::abs(rad[k]);
            slack += std::abs(w[k]) * rk;
        }
        return std::abs(pc) + slack;
    };
    return obj;
}

/// Dual norm sup{ |<phi, x>| : norm(s, x) <= 1 }.  Closed form for Lp via
/// the Hölder conjugate; polytope and subspace duals (quotient norms) go
/// through the optimizer over the primal ball.
inline double dual_norm(const Space& s, const Functional& phi,
                        const MaximizeOptions& opts = {}) {
    check_dim(s, phi.size(), "dual_norm");
    if (s.is_lp()) return lp_norm_of_moduli(phi.coords, holder_conjugate(s.lp_exponent()));
    Objective obj = pairing_objective(phi, s.field());
    SearchDomain dom{s, {}, /*primal=*/true};
    return maximize(obj, dom, opts).lower;
}

/// Certified interval for a numerically computed dual norm (small dims).
inline CertifiedInterval dual_norm_certified(const Space& s, const Functional& phi,
                                             double delta) {
    Objective obj = pairing_objective(phi, s.field());
    SearchDomain dom{s, {}, /*primal=*/true};
    return certified_grid(obj, dom, delta);
}

/// norm(codomain, T x) as an objective over domain vectors.
inline Objective image_norm_objective(const LinearMap& T) {
    Objective obj;
    const Space cod = T.codomain;
    const Field field = T.domain.field();
    detail::BallDomain codball = detail::primal_ball_domain(cod);
    const Eigen::MatrixXd Treal = realify(T.matrix, field);
    const Eigen::MatrixXd Tabs = Treal.cwiseAbs();
    auto codgauge = codball.gauge;
    auto codsub = codball.gauge_subgrad;
    const double lip_cod = codball.gauge_lipschitz;

    obj.evaluate = [T, cod](const Functional& x) {
        Vector v{std::vector<Scalar>(x.coords)};
        return Scalar(norm(cod, apply(T, v)), 0.0);
    };
    obj.gradient = [Treal, codsub, field](const Functional& x) {
        std::vector<double> xr;
        to_real_params(x.coords, field, xr);
        Eigen::VectorXd img = Treal * Eigen::Map<const Eigen::VectorXd>(
                                          xr.data(), static_cast<Eigen::Index>(xr.size()));
        Eigen::VectorXd gs(img.size());
        codsub(std::span<const double>(img.data(), static_cast<std::size_t>(img.size())),
               std::span<double>(gs.data(), static_cast<std::size_t>(gs.size())));
        Eigen::VectorXd g = Treal.transpose() * gs;
        std::vector<Scalar> out(static_cast<std::size_t>(g.size()));
        for (Eigen::Index j = 0; j < g.size(); ++j) out[static_cast<std::size_t>(j)] = Scalar(g(j), 0.0);
        return out;
    };
    obj.lipschitz_bound = lip_cod * detail::spectral_norm_bound(T.matrix);
    obj.homogeneity = 1;
    obj.phase_invariant = true;
    obj.box_bound = [T, cod, Tabs, lip_cod, field](const Functional& c,
                                                   std::span<const double> rad) {
        Vector v{std::vector<Scalar>(c.coords)};
        const double base = norm(cod, apply(T, v));
        Eigen::VectorXd dr = Tabs * Eigen::Map<const Eigen::VectorXd>(
                                        rad.data(), static_cast<Eigen::Index>(rad.size()));
        return base + lip_cod * dr.norm();
    };
    return obj;
}

namespace detail {

inline std::optional<double> diagonal_lp_operator_norm(const LinearMap& T) {
    if (!T.domain.is_lp() || !T.codomain.is_lp()) return std::nullopt;
    if (T.matrix.rows() != T.matrix.cols()) return std::nullopt;
    for (Eigen::Index i = 0; i < T.matrix.rows(); ++i)
        for (Eigen::Index j = 0; j < T.matrix.cols(); ++j)
            if (i != j && T.matrix(i, j) != Scalar(0.0, 0.0)) return std::nullopt;
    const double p = T.domain.lp_exponent();
    const double q = T.codomain.lp_exponent();
    std::vector<Scalar> diag(static_cast<std::size_t>(T.matrix.rows()));
    for (Eigen::Index i = 0; i < T.matrix.rows(); ++i) diag[static_cast<std::size_t>(i)] = T.matrix(i, i);
    // ||diag(c) : lp -> lq|| = ||c||_s with 1/s = max(0, 1/q - 1/p).
    const double invp = (p == kInf) ? 0.0 : 1.0 / p;
    const double invq = (q == kInf) ? 0.0 : 1.0 / q;
    const double invs = std::max(0.0, invq - invp);
    const double s = (invs == 0.0) ? kInf : 1.0 / invs;
    return lp_norm_of_moduli(diag, s);
}

}  // namespace detail

/// sup{ norm(codomain, T x) : norm(domain, x) <= 1 }.  Exact for diagonal
/// maps between Lp spaces, multi-start optimization otherwise.
inline double operator_norm(const LinearMap& T, const MaximizeOptions& opts = {}) {
    if (auto exact = detail::diagonal_lp_operator_norm(T)) return *exact;
    Objective obj = image_norm_objective(T);
    SearchDomain dom{T.domain, {}, /*primal=*/true};
    return maximize(obj, dom, opts).lower;
}

inline CertifiedInterval operator_norm_certified(const LinearMap& T, double delta) {
    Objective obj = image_norm_objective(T);
    SearchDomain dom{T.domain, {}, /*primal=*/true};
    return certified_grid(obj, dom, delta);
}

struct EuclideanIso {
    LinearMap T;
    double d;
};

/// Scalar multiple of the identity c I : l2^m -> lp^m with ||T|| = d and
/// ||T^{-1}|| = 1, where d = m^{|1/2 - 1/p|}.
inline EuclideanIso euclidean_iso_for_lp(int m, double p, Field field = Field::Real) {
    if (m < 1) throw InputError("euclidean_iso_for_lp: m must be positive");
    if (!(p >= 1.0)) throw InputError("euclidean_iso_for_lp: p must be >= 1");
    const double invp = (p == kInf) ? 0.0 : 1.0 / p;
    const double md = static_cast<double>(m);
    const double c = (p >= 2.0) ? std::pow(md, 0.5 - invp) : 1.0;
    const double d = std::pow(md, std::abs(0.5 - invp));
    LinearMap T(Eigen::MatrixXcd::Identity(m, m) * c, Space::euclidean(field, m),
                Space::lp(field, m, p));
    return EuclideanIso{std::move(T), d};
}

/// A functional with dual norm at most 1 and pair(phi, x) = norm(s, x).
inline Functional norming_functional(const Space& s, const Vector& x) {
    check_dim(s, x.size(), "norming_functional");
    Functional phi;
    phi.coords.assign(x.size(), Scalar(0.0, 0.0));
    const double nx = norm(s, x);
    if (nx <= 0.0) return phi;
    if (s.is_lp()) {
        const double p = s.lp_exponent();
        if (p == kInf) {
            std::size_t kmax = 0;
            double best = -1.0;
            for (std::size_t k = 0; k < x.size(); ++k)
                if (std::abs(x[k]) > best) {
                    best = std::abs(x[k]);
                    kmax = k;
                }
            phi[kmax] = std::conj(unit_phase(x[kmax]));
            return phi;
        }
        if (p == 1.0) {
            for (std::size_t k = 0; k < x.size(); ++k)
                if (std::abs(x[k]) > 0.0) phi[k] = std::conj(unit_phase(x[k]));
            return phi;
        }
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double a = std::abs(x[k]);
            if (a > 0.0) phi[k] = std::conj(unit_phase(x[k])) * std::pow(a / nx, p - 1.0);
        }
        return phi;
    }
    if (s.is_polytope()) {
        const auto& gens = s.as_polytope().generators;
        double best = -1.0;
        std::size_t ibest = 0;
        Scalar zbest(0.0, 0.0);
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const Scalar z = pair(gens[i], x);
            if (std::abs(z) > best) {
                best = std::abs(z);
                ibest = i;
                zbest = z;
            }
        }
        const Scalar ph = std::conj(unit_phase(zbest));
        for (std::size_t k = 0; k < x.size(); ++k) phi[k] = ph * gens[ibest][k];
        return phi;
    }
    const auto& sub = s.as_subspace();
    const Functional host_phi = norming_functional(*sub.host, host_coordinates(s, x));
    for (std::size_t k = 0; k < sub.basis.size(); ++k) {
        Scalar v(0.0, 0.0);
        for (std::size_t j = 0; j < host_phi.size(); ++j)
            v += host_phi[j] * sub.basis[k].coords[j];
        phi[k] = v;
    }
    return phi;
}

/// Hahn-Banach extension for Euclidean hosts with an orthonormal subspace
/// basis: precompose with the orthogonal projection, which preserves the
/// dual norm.
inline Functional extend_functional_euclidean(const Space& sub_space, const Functional& phi) {
    const auto& sub = sub_space.as_subspace();
    if (!sub.host->is_euclidean())
        throw InputError("extend_functional_euclidean needs a Euclidean host");
    Functional out;
    out.coords.assign(static_cast<std::size_t>(sub.host->dim()), Scalar(0.0, 0.0));
    for (std::size_t k = 0; k < sub.basis.size(); ++k)
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += phi[k] * std::conj(sub.basis[k].coords[i]);
    return out;
}

}  // namespace symtensor
