#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symtensor/spaces.hpp"

namespace symtensor {

/// Maximand |f(phi)| over a unit ball.  `evaluate` returns f itself (a
/// scalar; real-valued objectives carry zero imaginary part), `gradient`
/// the partial derivatives of f with respect to the real parametrization
/// of phi.  `lipschitz_bound` must dominate the gradient of |f| on the
/// search ball in the Euclidean metric of the real parametrization; the
/// certified grid refuses objectives without one.
struct Objective {
    std::function<Scalar(const Functional&)> evaluate;
    std::function<std::vector<Scalar>(const Functional&)> gradient;
    double lipschitz_bound = 0.0;

    // Optional sharpeners used by the certified grid.
    double hess_abs_sq_bound = 0.0;  // bound on the Hessian of |f|^2 over the ball
    double value_bound = 0.0;        // a priori bound on sup |f| (0 = unknown)
    int homogeneity = 0;             // f(c phi) = c^n f(phi); 0 = not homogeneous
    bool phase_invariant = false;    // |f(zeta phi)| = |f(phi)| for |zeta| = 1
    std::vector<Functional> hint_starts;
    // sup of |f| over the coordinate box {|phi_j - c_j| <= radius_j} in the
    // real parametrization, given center c and per-coordinate radii.
    std::function<double(const Functional&, std::span<const double>)> box_bound;
};

/// Equality constraint <row, phi> = target on the searched functional.
struct LinearConstraint {
    Functional row;
    Scalar target{0.0, 0.0};
};

/// Feasible set of a maximization: the dual unit ball of `space` (or the
/// primal ball when `primal` is set) intersected with linear equalities.
struct SearchDomain {
    Space space;
    std::vector<LinearConstraint> constraints{};
    bool primal = false;
};

struct NormResult {
    double lower = 0.0;
    Functional maximizer;
    std::optional<double> upper;
    int starts_used = 0;
    std::string method;
};

struct CertifiedInterval {
    double lower = 0.0;
    double upper = 0.0;
};

struct MaximizeOptions {
    int starts = 64;
    int max_iter = 400;
    double tol = 1e-12;
    std::uint64_t seed = 0;
    // When positive, starts whose value is within this window of the best
    // compete by the canonical coordinate order instead of start index.
    double tie_lex_tol = 0.0;
};

namespace detail {

// ---------------------------------------------------------------------------
// Ball domains: {y in R^D : gauge(y) <= 1} mapped linearly into functional
// (or vector) coordinates.  Lp balls search their own coordinates; polytope
// dual balls are searched through absolutely convex coefficients over the
// generators; subspace dual balls through the host dual ball and the
// restriction map (the quotient parametrization).
// ---------------------------------------------------------------------------

struct BallDomain {
    Field field = Field::Real;
    int point_dim = 0;    // scalar coordinates of the mapped point
    int real_dim = 0;     // real search parameters
    std::function<double(std::span<const double>)> gauge;
    std::function<void(std::span<const double>, std::span<double>)> gauge_subgrad;
    double gauge_lipschitz = 1.0;
    double euclid_lower = 1.0;  // gauge(y) >= euclid_lower * |y|_2
    Eigen::MatrixXd map;        // realified; empty means identity
    double map_norm = 1.0;      // upper bound on the spectral norm of `map`
    double moduli_q = -1.0;     // gauge = moduli lq norm when positive

    bool identity() const { return map.size() == 0; }
    double outer_radius() const { return 1.0 / euclid_lower; }
};

inline double moduli_lp_gauge(std::span<const double> y, Field f, double p) {
    if (f == Field::Real) {
        if (p == kInf) {
            double m = 0.0;
            for (double v : y) m = std::max(m, std::abs(v));
            return m;
        }
        if (p == 1.0) {
            double s = 0.0;
            for (double v : y) s += std::abs(v);
            return s;
        }
        if (p == 2.0) {
            double s = 0.0;
            for (double v : y) s += v * v;
            return std::sqrt(s);
        }
        double s = 0.0;
        for (double v : y) s += std::pow(std::abs(v), p);
        return std::pow(s, 1.0 / p);
    }
    const std::size_t m = y.size() / 2;
    if (p == kInf) {
        double mx = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            mx = std::max(mx, std::hypot(y[2 * k], y[2 * k + 1]));
        return mx;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double a = std::hypot(y[2 * k], y[2 * k + 1]);
        s += (p == 1.0) ? a : std::pow(a, p);
    }
    return (p == 1.0) ? s : std::pow(s, 1.0 / p);
}

inline void moduli_lp_subgrad(std::span<const double> y, Field f, double p,
                              std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const int mult = field_multiplicity(f);
    const std::size_t m = y.size() / static_cast<std::size_t>(mult);
    auto modulus = [&](std::size_t k) {
        return f == Field::Complex ? std::hypot(y[2 * k], y[2 * k + 1]) : std::abs(y[k]);
    };
    if (p == kInf) {
        std::size_t kmax = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double a = modulus(k);
            if (a > best) {
                best = a;
                kmax = k;
            }
        }
        if (best <= 0.0) return;
        if (f == Field::Complex) {
            out[2 * kmax] = y[2 * kmax] / best;
            out[2 * kmax + 1] = y[2 * kmax + 1] / best;
        } else {
            out[kmax] = y[kmax] > 0 ? 1.0 : -1.0;
        }
        return;
    }
    const double g = moduli_lp_gauge(y, f, p);
    if (g <= 0.0) return;
    for (std::size_t k = 0; k < m; ++k) {
        const double a = modulus(k);
        if (a <= 0.0) continue;
        const double w = (p == 1.0) ? 1.0 / a : std::pow(a / g, p - 1.0) / a;
        if (f == Field::Complex) {
            out[2 * k] = w * y[2 * k];
            out[2 * k + 1] = w * y[2 * k + 1];
        } else {
            out[k] = w * y[k];
        }
    }
}

inline double lp_gauge_lipschitz(int dim, double p) {
    // |gauge(a) - gauge(b)| <= lip * |a - b|_2 in the real parametrization.
    if (p >= 2.0) return 1.0;
    return std::pow(static_cast<double>(dim), 1.0 / p - 0.5);
}

inline double lp_euclid_lower(int dim, double p) {
    // gauge(y) >= c * |y|_2.
    if (p <= 2.0) return 1.0;
    if (p == kInf) return std::pow(static_cast<double>(dim), -0.5);
    return std::pow(static_cast<double>(dim), 1.0 / p - 0.5);
}

inline Eigen::MatrixXcd generator_matrix_cols(const std::vector<Functional>& gens) {
    Eigen::MatrixXcd M(gens.front().size(), gens.size());
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (std::size_t i = 0; i < gens[j].size(); ++i)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gens[j][i];
    return M;
}

inline double spectral_norm_bound(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(0) * (1.0 + 1e-12) + 1e-300;
}

inline double smallest_singular_value(const Eigen::MatrixXcd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

inline BallDomain primal_ball_domain(const Space& s) {
    BallDomain d;
    d.field = s.field();
    d.point_dim = s.dim();
    const int mult = field_multiplicity(s.field());
    d.real_dim = s.dim() * mult;
    if (s.is_lp()) {
        const double p = s.lp_exponent();
        const Field f = s.field();
        d.gauge = [f, p](std::span<const double> y) { return moduli_lp_gauge(y, f, p); };
        d.gauge_subgrad = [f, p](std::span<const double> y, std::span<double> out) {
            moduli_lp_subgrad(y, f, p, out);
        };
        d.gauge_lipschitz = lp_gauge_lipschitz(s.dim(), p);
        d.euclid_lower = lp_euclid_lower(s.dim(), p);
        d.moduli_q = p;
        return d;
    }
    if (s.is_polytope()) {
        const auto gens = s.as_polytope().generators;
        const Field f = s.field();
        d.gauge = [gens, f](std::span<const double> y) {
            std::vector<Scalar> x;
            from_real_params(y, f, x);
            double m = 0.0;
            for (const auto& g : gens) {
                Scalar z(0.0, 0.0);
                for (std::size_t k = 0; k < x.size(); ++k) z += g[k] * x[k];
                m = std::max(m, std::abs(z));
            }
            return m;
        };
        d.gauge_subgrad = [gens, f](std::span<const double> y, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            std::vector<Scalar> x;
            from_real_params(y, f, x);
            double best = -1.0;
            std::size_t ibest = 0;
            Scalar zbest(0.0, 0.0);
            for (std::size_t i = 0; i < gens.size(); ++i) {
                Scalar z(0.0, 0.0);
                for (std::size_t k = 0; k < x.size(); ++k) z += gens[i][k] * x[k];
                if (std::abs(z) > best) {
                    best = std::abs(z);
                    ibest = i;
                    zbest = z;
                }
            }
            if (best <= 0.0) return;
            const Scalar ph = std::conj(zbest) / best;
            for (std::size_t k = 0; k < x.size(); ++k) {
                const Scalar w = ph * gens[ibest][k];
                if (f == Field::Complex) {
                    out[2 * k] = w.real();
                    out[2 * k + 1] = -w.imag();  // d|z|/d(im x_k) = Re(conj(z) i g_k)/|z|
                } else {
                    out[k] = w.real();
                }
            }
        };
        const Eigen::MatrixXcd G = generator_matrix_cols(gens).transpose();
        double lip = 0.0;
        for (const auto& g : gens) lip = std::max(lip, euclid_norm(g.coords));
        d.gauge_lipschitz = lip;
        d.euclid_lower = smallest_singular_value(G) / std::sqrt(static_cast<double>(gens.size()));
        return d;
    }
    const auto& sub = s.as_subspace();
    BallDomain host = primal_ball_domain(*sub.host);
    Eigen::MatrixXcd B(sub.host->dim(), s.dim());
    for (int j = 0; j < s.dim(); ++j)
        for (int i = 0; i < sub.host->dim(); ++i)
            B(i, j) = sub.basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    const Eigen::MatrixXd Breal = realify(B, s.field());
    const double bmax = spectral_norm_bound(B);
    const double bmin = smallest_singular_value(B);
    auto hostgauge = host.gauge;
    auto hostsub = host.gauge_subgrad;
    const Eigen::Index hd = Breal.rows();
    d.gauge = [Breal, hostgauge, hd](std::span<const double> y) {
        Eigen::VectorXd v = Breal * Eigen::Map<const Eigen::VectorXd>(y.data(), Breal.cols());
        return hostgauge(std::span<const double>(v.data(), static_cast<std::size_t>(hd)));
    };
    d.gauge_subgrad = [Breal, hostsub, hd](std::span<const double> y, std::span<double> out) {
        Eigen::VectorXd v = Breal * Eigen::Map<const Eigen::VectorXd>(y.data(), Breal.cols());
        Eigen::VectorXd gs(hd);
        hostsub(std::span<const double>(v.data(), static_cast<std::size_t>(hd)),
                std::span<double>(gs.data(), static_cast<std::size_t>(hd)));
        Eigen::Map<Eigen::VectorXd>(out.data(), Breal.cols()) = Breal.transpose() * gs;
    };
    d.gauge_lipschitz = host.gauge_lipschitz * bmax;
    d.euclid_lower = host.euclid_lower * bmin;
    return d;
}

inline BallDomain dual_ball_domain(const Space& s) {
    BallDomain d;
    d.field = s.field();
    d.point_dim = s.dim();
    const int mult = field_multiplicity(s.field());
    if (s.is_lp()) {
        const double q = holder_conjugate(s.lp_exponent());
        const Field f = s.field();
        d.real_dim = s.dim() * mult;
        d.gauge = [f, q](std::span<const double> y) { return moduli_lp_gauge(y, f, q); };
        d.gauge_subgrad = [f, q](std::span<const double> y, std::span<double> out) {
            moduli_lp_subgrad(y, f, q, out);
        };
        d.gauge_lipschitz = lp_gauge_lipschitz(s.dim(), q);
        d.euclid_lower = lp_euclid_lower(s.dim(), q);
        d.moduli_q = q;
        return d;
    }
    if (s.is_polytope()) {
        // Dual ball = absolutely convex hull of the generators: search the
        // coefficient l1 ball, mapped by the generator matrix.
        const auto& gens = s.as_polytope().generators;
        const Field f = s.field();
        const int g = static_cast<int>(gens.size());
        d.real_dim = g * mult;
        d.gauge = [f](std::span<const double> y) { return moduli_lp_gauge(y, f, 1.0); };
        d.gauge_subgrad = [f](std::span<const double> y, std::span<double> out) {
            moduli_lp_subgrad(y, f, 1.0, out);
        };
        d.gauge_lipschitz = std::sqrt(static_cast<double>(g));
        d.euclid_lower = 1.0;
        d.moduli_q = 1.0;
        const Eigen::MatrixXcd M = generator_matrix_cols(gens);
        d.map = realify(M, f);
        d.map_norm = spectral_norm_bound(M);
        return d;
    }
    // Subspace dual ball = image of the host dual ball under restriction to
    // the basis (every functional on the subspace extends, by Hahn-Banach,
    // to an equal-norm functional on the host).
    const auto& sub = s.as_subspace();
    BallDomain host = dual_ball_domain(*sub.host);
    Eigen::MatrixXcd R(s.dim(), sub.host->dim());
    for (int k = 0; k < s.dim(); ++k)
        for (int j = 0; j < sub.host->dim(); ++j)
            R(k, j) = sub.basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
    const double rnorm = spectral_norm_bound(R);
    const Eigen::MatrixXd Rreal = realify(R, s.field());
    d.real_dim = host.real_dim;
    d.gauge = host.gauge;
    d.gauge_subgrad = host.gauge_subgrad;
    d.gauge_lipschitz = host.gauge_lipschitz;
    d.euclid_lower = host.euclid_lower;
    d.moduli_q = host.moduli_q;
    if (host.identity()) {
        d.map = Rreal;
        d.map_norm = rnorm;
    } else {
        d.map = Rreal * host.map;
        d.map_norm = rnorm * host.map_norm;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Resolved domain: realified constraints, nullspace basis, feasibility data.
// ---------------------------------------------------------------------------

struct ResolvedDomain {
    BallDomain ball;
    Eigen::MatrixXd A;          // rows x real_dim, possibly empty
    Eigen::VectorXd b;
    Eigen::MatrixXd rowspace;   // rank x real_dim, orthonormal rows
    Eigen::MatrixXd pinv;       // real_dim x rows
    int rank = 0;
    bool homogeneous = true;
    bool can_rotate = false;    // global phase rotations preserve feasibility

    Eigen::VectorXd y0;         // particular solution of A y = b (0 if homogeneous)
};

inline void map_point(const BallDomain& ball, std::span<const double> y,
                      std::vector<double>& phi_real, Functional& phi) {
    if (ball.identity()) {
        phi_real.assign(y.begin(), y.end());
    } else {
        phi_real.resize(static_cast<std::size_t>(ball.map.rows()));
        Eigen::Map<Eigen::VectorXd>(phi_real.data(), ball.map.rows()) =
            ball.map * Eigen::Map<const Eigen::VectorXd>(y.data(), ball.map.cols());
    }
    from_real_params(phi_real, ball.field, phi.coords);
}

inline ResolvedDomain resolve_domain(const SearchDomain& dom) {
    ResolvedDomain r;
    r.ball = dom.primal ? primal_ball_domain(dom.space) : dual_ball_domain(dom.space);
    const Field f = dom.space.field();
    const int mult = field_multiplicity(f);
    const int dphi = r.ball.point_dim * mult;
    const int rows_per = mult;
    const int nrows = static_cast<int>(dom.constraints.size()) * rows_per;
    Eigen::MatrixXd Aphi(nrows, dphi);
    Eigen::VectorXd b(nrows);
    for (std::size_t c = 0; c < dom.constraints.size(); ++c) {
        const auto& lc = dom.constraints[c];
        check_dim(dom.space, lc.row.size(), "constraint row");
        if (f == Field::Real && lc.target.imag() != 0.0)
            throw InputError("real-field constraint with complex target");
        for (int k = 0; k < r.ball.point_dim; ++k) {
            const Scalar a = lc.row[static_cast<std::size_t>(k)];
            if (f == Field::Complex) {
                Aphi(static_cast<Eigen::Index>(2 * c), 2 * k) = a.real();
                Aphi(static_cast<Eigen::Index>(2 * c), 2 * k + 1) = -a.imag();
                Aphi(static_cast<Eigen::Index>(2 * c + 1), 2 * k) = a.imag();
                Aphi(static_cast<Eigen::Index>(2 * c + 1), 2 * k + 1) = a.real();
            } else {
                Aphi(static_cast<Eigen::Index>(c), k) = a.real();
            }
        }
        if (f == Field::Complex) {
            b(static_cast<Eigen::Index>(2 * c)) = lc.target.real();
            b(static_cast<Eigen::Index>(2 * c + 1)) = lc.target.imag();
        } else {
            b(static_cast<Eigen::Index>(c)) = lc.target.real();
        }
    }
    r.A = r.ball.identity() ? Aphi : Eigen::MatrixXd(Aphi * r.ball.map);
    r.b = b;
    r.homogeneous = (b.size() == 0) || (b.lpNorm<Eigen::Infinity>() == 0.0);
    r.can_rotate = r.homogeneous;
    if (r.A.rows() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.A, Eigen::ComputeFullV | Eigen::ComputeFullU);
        const double thresh = 1e-12 * std::max(1.0, svd.singularValues()(0));
        int rank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > thresh) ++rank;
        r.rank = rank;
        Eigen::MatrixXd V = svd.matrixV();
        r.rowspace = V.leftCols(rank).transpose();
        Eigen::MatrixXd Sinv = Eigen::MatrixXd::Zero(V.cols(), svd.matrixU().cols());
        for (int i = 0; i < rank; ++i) Sinv(i, i) = 1.0 / svd.singularValues()(i);
        r.pinv = V * Sinv * svd.matrixU().transpose();
        r.y0 = r.pinv * r.b;
        if (r.b.size() > 0 && (r.A * r.y0 - r.b).lpNorm<Eigen::Infinity>() > 1e-9)
            throw OptimizationError("infeasible linear constraints");
        if (!r.homogeneous && r.ball.gauge(std::span<const double>(r.y0.data(), static_cast<std::size_t>(r.y0.size()))) > 1.0 + 1e-9)
            throw OptimizationError("constraints do not meet the unit ball");
    } else {
        r.rank = 0;
        r.y0 = Eigen::VectorXd::Zero(r.ball.real_dim);
    }
    return r;
}

/// Alternating projection: radial scaling onto the ball, then least-squares
/// projection onto the affine constraint set, iterated to joint feasibility.
inline void project_feasible(const ResolvedDomain& dom, Eigen::VectorXd& y) {
    const auto& ball = dom.ball;
    for (int it = 0; it < 100; ++it) {
        const double g =
            ball.gauge(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        if (g > 1.0) y /= g;
        bool ok_constraints = true;
        if (dom.rank > 0) {
            Eigen::VectorXd resid = dom.A * y - dom.b;
            if (resid.lpNorm<Eigen::Infinity>() > 1e-10) {
                y -= dom.pinv * resid;
                ok_constraints = false;
            }
        }
        const double g2 =
            ball.gauge(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
        if (ok_constraints && g2 <= 1.0 + 1e-10) break;
    }
    const double g =
        ball.gauge(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
    if (g > 1.0 && dom.homogeneous) y /= g;
}

/// Canonical representative of the phase orbit: rotate so the first
/// significantly nonzero coordinate has zero phase (sign for real fields).
inline void canonicalize_phase(const ResolvedDomain& dom, bool allowed, Eigen::VectorXd& y) {
    if (!allowed || !dom.can_rotate) return;
    const double mx = y.lpNorm<Eigen::Infinity>();
    if (mx <= 0.0) return;
    if (dom.ball.field == Field::Complex) {
        for (Eigen::Index k = 0; k + 1 < y.size(); k += 2) {
            const double m = std::hypot(y(k), y(k + 1));
            if (m > 1e-12 * mx) {
                const double c = y(k) / m, s = y(k + 1) / m;
                for (Eigen::Index j = 0; j + 1 < y.size(); j += 2) {
                    const double re = y(j), im = y(j + 1);
                    y(j) = c * re + s * im;
                    y(j + 1) = c * im - s * re;
                }
                return;
            }
        }
    } else {
        for (Eigen::Index k = 0; k < y.size(); ++k) {
            if (std::abs(y(k)) > 1e-12 * mx) {
                if (y(k) < 0.0) y = -y;
                return;
            }
        }
    }
}

/// Canonical preference between near-tied maximizers: larger leading
/// coordinate moduli first, then plain coordinate order.
inline bool canonical_less(const Functional& a, const Functional& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) {
        const double ra = std::abs(a[k].real()), rb = std::abs(b[k].real());
        if (ra != rb) return ra > rb;
        const double ia = std::abs(a[k].imag()), ib = std::abs(b[k].imag());
        if (ia != ib) return ia > ib;
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
        if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
    }
    return false;
}

/// argmax of <g, y> over {moduli_lq(y) <= 1} in real parameters: the phase
/// of each coordinate follows g and the moduli are the lq norming weights.
inline void moduli_lp_linear_max(std::span<const double> g, Field f, double q,
                                 std::span<double> out) {
    const int mult = field_multiplicity(f);
    const std::size_t m = g.size() / static_cast<std::size_t>(mult);
    std::fill(out.begin(), out.end(), 0.0);
    auto modulus = [&](std::size_t k) {
        return f == Field::Complex ? std::hypot(g[2 * k], g[2 * k + 1]) : std::abs(g[k]);
    };
    if (q == 1.0) {
        std::size_t kmax = 0;
        double best = -1.0;
        for (std::size_t k = 0; k < m; ++k)
            if (modulus(k) > best) {
                best = modulus(k);
                kmax = k;
            }
        if (best <= 0.0) return;
        if (f == Field::Complex) {
            out[2 * kmax] = g[2 * kmax] / best;
            out[2 * kmax + 1] = g[2 * kmax + 1] / best;
        } else {
            out[kmax] = g[kmax] > 0 ? 1.0 : -1.0;
        }
        return;
    }
    if (q == kInf) {
        for (std::size_t k = 0; k < m; ++k) {
            const double a = modulus(k);
            if (a <= 0.0) continue;
            if (f == Field::Complex) {
                out[2 * k] = g[2 * k] / a;
                out[2 * k + 1] = g[2 * k + 1] / a;
            } else {
                out[k] = g[k] > 0 ? 1.0 : -1.0;
            }
        }
        return;
    }
    const double qc = holder_conjugate(q);
    double gn = 0.0;
    for (std::size_t k = 0; k < m; ++k) gn += std::pow(modulus(k), qc);
    gn = std::pow(gn, 1.0 / qc);
    if (gn <= 0.0) return;
    for (std::size_t k = 0; k < m; ++k) {
        const double a = modulus(k);
        if (a <= 0.0) continue;
        const double w = std::pow(a / gn, qc - 1.0) / a;
        if (f == Field::Complex) {
            out[2 * k] = w * g[2 * k];
            out[2 * k + 1] = w * g[2 * k + 1];
        } else {
            out[k] = w * g[k];
        }
    }
}

struct EvalScratch {
    std::vector<double> phi_real;
    Functional phi;
};

inline double objective_abs(const Objective& obj, const BallDomain& ball,
                            std::span<const double> y, EvalScratch& scratch) {
    map_point(ball, y, scratch.phi_real, scratch.phi);
    const Scalar f = obj.evaluate(scratch.phi);
    if (!is_finite(f)) throw OptimizationError("objective returned a non-finite value");
    return std::abs(f);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// maximize: multi-start projected ascent on H = |f|^2.
// ---------------------------------------------------------------------------

inline NormResult maximize(const Objective& obj, const SearchDomain& dom,
                           const MaximizeOptions& opts = {}) {
    using namespace detail;
    if (opts.starts < 1) throw InputError("maximize requires at least one start");
    ResolvedDomain rd = resolve_domain(dom);
    const BallDomain& ball = rd.ball;
    const int D = ball.real_dim;
    const bool rotate = obj.phase_invariant;

    // Start list: hints, +-basis directions, sign patterns, seeded random.
    std::vector<Eigen::VectorXd> starts;
    starts.reserve(static_cast<std::size_t>(opts.starts));
    Eigen::MatrixXd map_pinv;
    if (!obj.hint_starts.empty() && !ball.identity())
        map_pinv = ball.map.completeOrthogonalDecomposition().pseudoInverse();
    std::vector<double> hint_real;
    for (const auto& h : obj.hint_starts) {
        if (static_cast<int>(h.size()) != ball.point_dim) continue;
        to_real_params(h.coords, ball.field, hint_real);
        Eigen::Map<const Eigen::VectorXd> hr(hint_real.data(),
                                             static_cast<Eigen::Index>(hint_real.size()));
        starts.emplace_back(ball.identity() ? Eigen::VectorXd(hr) : Eigen::VectorXd(map_pinv * hr));
    }
    for (int j = 0; j < D; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(D);
        e(j) = 1.0;
        starts.push_back(e);
        starts.push_back(-e);
    }
    if (D <= 5) {
        for (int mask = 0; mask < (1 << D); ++mask) {
            Eigen::VectorXd v(D);
            for (int j = 0; j < D; ++j) v(j) = (mask >> j) & 1 ? -1.0 : 1.0;
            starts.push_back(v);
        }
    } else {
        starts.push_back(Eigen::VectorXd::Ones(D));
        Eigen::VectorXd alt(D);
        for (int j = 0; j < D; ++j) alt(j) = (j % 2 == 0) ? 1.0 : -1.0;
        starts.push_back(alt);
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(starts.size()) < opts.starts) {
        Eigen::VectorXd v(D);
        for (int j = 0; j < D; ++j) v(j) = gauss(rng);
        starts.push_back(v);
    }
    if (static_cast<int>(starts.size()) > opts.starts)
        starts.resize(static_cast<std::size_t>(opts.starts));

    EvalScratch scratch;
    std::vector<double> phi_real;
    auto grad_H = [&](const Eigen::VectorXd& y, Scalar& f_out) -> Eigen::VectorXd {
        map_point(ball, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                  phi_real, scratch.phi);
        const Scalar f = obj.evaluate(scratch.phi);
        if (!is_finite(f)) throw OptimizationError("objective returned a non-finite value");
        f_out = f;
        const std::vector<Scalar> gf = obj.gradient(scratch.phi);
        Eigen::VectorXd gphi(static_cast<Eigen::Index>(gf.size()));
        for (std::size_t j = 0; j < gf.size(); ++j)
            gphi(static_cast<Eigen::Index>(j)) = 2.0 * (std::conj(f) * gf[j]).real();
        if (ball.identity()) return gphi;
        return ball.map.transpose() * gphi;
    };

    struct Outcome {
        double value;
        Eigen::VectorXd y;
        Functional phi;
    };
    std::vector<Outcome> outcomes;
    outcomes.reserve(starts.size());

    Eigen::VectorXd nu(D), d(D);
    for (const Eigen::VectorXd& s0 : starts) {
        Eigen::VectorXd y = s0;
        // Scale structured/random directions onto the unit sphere first.
        {
            const double g = ball.gauge(
                std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
            if (g > 0.0) y /= g;
        }
        project_feasible(rd, y);
        canonicalize_phase(rd, rotate, y);
        Scalar f;
        Eigen::VectorXd g = grad_H(y, f);
        double H = std::norm(f);
        int stalls = 0;
        Eigen::VectorXd fw(D), cand(D), best_cand(D);
        auto eval_H = [&](const Eigen::VectorXd& pt) {
            map_point(ball, std::span<const double>(pt.data(), static_cast<std::size_t>(pt.size())),
                      phi_real, scratch.phi);
            const Scalar fc = obj.evaluate(scratch.phi);
            if (!is_finite(fc)) throw OptimizationError("objective returned a non-finite value");
            return std::norm(fc);
        };
        // Backtracking from t = 1 with the Armijo test on the projected step.
        auto line_search = [&](const Eigen::VectorXd& dir, Eigen::VectorXd& out, double& Hout) {
            double t = 1.0;
            for (int ls = 0; ls < 45; ++ls) {
                cand = y + t * dir;
                project_feasible(rd, cand);
                const double Hc = eval_H(cand);
                const double armijo = 1e-4 * g.dot(cand - y);
                if (Hc > H && Hc >= H + armijo) {
                    out = cand;
                    Hout = Hc;
                    return true;
                }
                t *= 0.5;
            }
            return false;
        };
        for (int iter = 0; iter < opts.max_iter; ++iter) {
            d = g;
            if (rd.rank > 0) d -= rd.rowspace.transpose() * (rd.rowspace * d);
            const double gauge_y = ball.gauge(
                std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
            if (gauge_y >= 1.0 - 1e-9) {
                ball.gauge_subgrad(
                    std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                    std::span<double>(nu.data(), static_cast<std::size_t>(nu.size())));
                if (rd.rank > 0) nu -= rd.rowspace.transpose() * (rd.rowspace * nu);
                const double nn = nu.squaredNorm();
                const double dn = d.dot(nu);
                if (nn > 0.0 && dn > 0.0) d -= (dn / nn) * nu;
            }
            bool accepted = false;
            double Hbest = H;
            double Hc = 0.0;
            if (d.norm() > 1e-14 * std::max(1.0, g.norm()) && line_search(d, best_cand, Hc)) {
                accepted = true;
                Hbest = Hc;
            }
            // Linearized step: move toward the ball point maximizing <g, .>.
            if (ball.moduli_q > 0.0 && g.norm() > 0.0) {
                moduli_lp_linear_max(
                    std::span<const double>(g.data(), static_cast<std::size_t>(g.size())),
                    ball.field, ball.moduli_q,
                    std::span<double>(fw.data(), static_cast<std::size_t>(fw.size())));
                Eigen::VectorXd dir = fw - y;
                if (dir.norm() > 1e-14) {
                    Eigen::VectorXd cand2(D);
                    double H2 = 0.0;
                    if (line_search(dir, cand2, H2) && H2 > Hbest) {
                        accepted = true;
                        Hbest = H2;
                        best_cand = cand2;
                    }
                }
            }
            if (!accepted) break;
            y = best_cand;
            canonicalize_phase(rd, rotate, y);
            const double improvement = Hbest - H;
            H = Hbest;
            g = grad_H(y, f);
            if (improvement <= opts.tol * std::max(1.0, H)) {
                if (++stalls >= 3) break;
            } else {
                stalls = 0;
            }
        }
        canonicalize_phase(rd, rotate, y);
        map_point(ball, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
                  phi_real, scratch.phi);
        const Scalar fv = obj.evaluate(scratch.phi);
        outcomes.push_back(Outcome{std::abs(fv), y, scratch.phi});
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < outcomes.size(); ++i)
        if (outcomes[i].value > outcomes[best].value) best = i;
    if (opts.tie_lex_tol > 0.0) {
        const double cutoff = outcomes[best].value - opts.tie_lex_tol;
        std::size_t chosen = best;
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes[i].value < cutoff) continue;
            if (detail::canonical_less(outcomes[i].phi, outcomes[chosen].phi)) chosen = i;
        }
        best = chosen;
    }

    NormResult res;
    res.maximizer = outcomes[best].phi;
    res.lower = outcomes[best].value;
    res.starts_used = static_cast<int>(starts.size());
    res.method = "multistart-ascent";
    return res;
}

// ---------------------------------------------------------------------------
// certified_grid: implicit delta-lattice enumeration with sound pruning.
//
// The interval it returns satisfies lower <= sup |f| <= upper with
// upper <= lower + lipschitz * delta * sqrt(dim_eff): leaves are refined
// until their half-diagonal (plus the radial projection shift) covers the
// feasible set at that resolution, and a subtree is discarded only when a
// certified bound shows it cannot beat the best value found so far.  For
// phase-invariant objectives in complex mode the global phase is removed
// by slicing (one coordinate made real), which is exhaustive because every
// point of the ball rotates into one of the slices without changing |f|.
// ---------------------------------------------------------------------------

inline CertifiedInterval certified_grid(const Objective& obj, const SearchDomain& dom,
                                        double delta) {
    using namespace detail;
    if (!(delta > 0.0)) throw InputError("certified_grid requires delta > 0");
    ResolvedDomain rd = resolve_domain(dom);
    const BallDomain& ball = rd.ball;
    const Field f = ball.field;
    const int mult = field_multiplicity(f);
    const int dphi_real = ball.point_dim * mult;
    const int dim_eff = dphi_real - rd.rank;
    if (!(obj.lipschitz_bound > 0.0))
        throw InputError("certified_grid refuses objectives without a Lipschitz bound");

    EvalScratch scratch;
    if (dim_eff <= 0) {
        // Feasible set is a single point.
        Eigen::VectorXd y = rd.y0;
        project_feasible(rd, y);
        const double v = objective_abs(
            obj, ball, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())),
            scratch);
        return CertifiedInterval{v, v};
    }
    if (dim_eff > 6)
        throw InputError("certified_grid: effective dimension exceeds the enumeration limit (6)");

    const double L = obj.lipschitz_bound;
    const double posted_width = L * delta * std::sqrt(static_cast<double>(dim_eff));
    const double cover_phi = delta * std::sqrt(static_cast<double>(dim_eff));
    const double cover_y = cover_phi / ball.map_norm;
    const double R_out = ball.outer_radius();
    const double Lg = ball.gauge_lipschitz;
    // Leaf half-diagonal eta with eta * (1 + Lg * (R_out + eta)) <= cover_y.
    const double eta = cover_y / (1.0 + Lg * (R_out + cover_y));

    const bool slice_phases = (f == Field::Complex) && obj.phase_invariant && rd.can_rotate;

    struct SliceSetup {
        Eigen::MatrixXd N;   // real_dim x Dz, orthonormal columns
        Eigen::VectorXd y0;
        Eigen::MatrixXd Kabs;  // |map * N| for structural radii
        int Dz;
    };

    auto build_slice = [&](int pin_coord) -> std::optional<SliceSetup> {
        Eigen::MatrixXd A = rd.A;
        Eigen::VectorXd b = rd.b;
        if (pin_coord >= 0) {
            A.conservativeResize(A.rows() + 1, ball.real_dim);
            A.row(A.rows() - 1).setZero();
            A(A.rows() - 1, 2 * pin_coord + 1) = 1.0;  // im(y_k) = 0
            b.conservativeResize(b.size() + 1);
            b(b.size() - 1) = 0.0;
        }
        SliceSetup s;
        if (A.rows() == 0) {
            s.N = Eigen::MatrixXd::Identity(ball.real_dim, ball.real_dim);
            s.y0 = Eigen::VectorXd::Zero(ball.real_dim);
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV | Eigen::ComputeFullU);
            const double thresh = 1e-12 * std::max(1.0, svd.singularValues()(0));
            int rank = 0;
            for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > thresh) ++rank;
            s.N = svd.matrixV().rightCols(ball.real_dim - rank);
            Eigen::MatrixXd Sinv = Eigen::MatrixXd::Zero(svd.matrixV().cols(), svd.matrixU().cols());
            for (int i = 0; i < rank; ++i) Sinv(i, i) = 1.0 / svd.singularValues()(i);
            s.y0 = svd.matrixV() * Sinv * svd.matrixU().transpose() * b;
            if (b.size() > 0 && (A * s.y0 - b).lpNorm<Eigen::Infinity>() > 1e-9)
                return std::nullopt;  // slice infeasible
        }
        s.Dz = static_cast<int>(s.N.cols());
        if (ball.identity())
            s.Kabs = s.N.cwiseAbs();
        else
            s.Kabs = (ball.map * s.N).cwiseAbs();
        return s;
    };

    std::vector<int> pins;
    if (slice_phases) {
        for (int k = 0; k < ball.real_dim / 2; ++k) pins.push_back(k);
    } else {
        pins.push_back(-1);
    }

    double lower = 0.0;
    double leaf_bound_max = 0.0;
    const bool have_hess = obj.hess_abs_sq_bound > 0.0;
    const bool have_box = static_cast<bool>(obj.box_bound);

    // Seed the incumbent with the objective's analytic hint points; a good
    // early lower bound is what lets the branch-and-bound prune.
    if (!obj.hint_starts.empty()) {
        Eigen::MatrixXd map_pinv;
        if (!ball.identity())
            map_pinv = ball.map.completeOrthogonalDecomposition().pseudoInverse();
        std::vector<double> hr;
        for (const auto& h : obj.hint_starts) {
            if (static_cast<int>(h.size()) != ball.point_dim) continue;
            to_real_params(h.coords, ball.field, hr);
            Eigen::Map<const Eigen::VectorXd> hv(hr.data(), static_cast<Eigen::Index>(hr.size()));
            Eigen::VectorXd y = ball.identity() ? Eigen::VectorXd(hv) : Eigen::VectorXd(map_pinv * hv);
            project_feasible(rd, y);
            lower = std::max(lower, objective_abs(obj, ball,
                                                  std::span<const double>(
                                                      y.data(), static_cast<std::size_t>(y.size())),
                                                  scratch));
        }
    }

    std::vector<double> phi_c_real, phi_e_real, rad_phi;
    Functional phi_c, phi_e;
    std::vector<Scalar> gf;

    for (int pin : pins) {
        auto setup = build_slice(pin);
        if (!setup) continue;
        const SliceSetup& S = *setup;
        if (S.Dz == 0) {
            Eigen::VectorXd y = S.y0;
            project_feasible(rd, y);
            lower = std::max(lower, objective_abs(obj, ball,
                                                  std::span<const double>(
                                                      y.data(), static_cast<std::size_t>(y.size())),
                                                  scratch));
            continue;
        }
        const double Rz = R_out + S.y0.norm();

        // Recursive box processing over z-space.
        struct Frame {
            Eigen::VectorXd center;
            Eigen::VectorXd half;
        };
        std::vector<Frame> stack;
        stack.push_back(Frame{Eigen::VectorXd::Zero(S.Dz), Eigen::VectorXd::Constant(S.Dz, Rz)});
        Eigen::VectorXd y_c(ball.real_dim), y_e(ball.real_dim);
        while (!stack.empty()) {
            Frame fr = std::move(stack.back());
            stack.pop_back();
            const double halfdiag = fr.half.norm();
            y_c = S.y0 + S.N * fr.center;
            const double g_c = ball.gauge(
                std::span<const double>(y_c.data(), static_cast<std::size_t>(y_c.size())));
            if (g_c - Lg * halfdiag > 1.0) continue;  // no feasible point in the box
            double shift = 0.0;
            if (g_c > 1.0) {
                if (rd.homogeneous) {
                    y_e = y_c / g_c;
                } else {
                    y_e = y_c;
                    project_feasible(rd, y_e);
                }
                shift = (y_e - y_c).norm();
            } else {
                y_e = y_c;
            }
            map_point(ball, std::span<const double>(y_e.data(), static_cast<std::size_t>(y_e.size())),
                      phi_e_real, phi_e);
            const Scalar fe = obj.evaluate(phi_e);
            if (!is_finite(fe)) throw OptimizationError("objective returned a non-finite value");
            const double v = std::abs(fe);
            if (v > lower) lower = v;

            const double rho_y = halfdiag + shift;
            const double rho_phi = rho_y * ball.map_norm;
            double bound = v + L * rho_phi;
            if (obj.value_bound > 0.0) bound = std::min(bound, obj.value_bound);
            if (have_hess && bound > lower) {
                gf = obj.gradient(phi_e);
                double gF = 0.0;
                for (const Scalar& gj : gf) gF += sqr(2.0 * (std::conj(fe) * gj).real());
                gF = std::sqrt(gF);
                const double b2 =
                    v * v + gF * rho_phi + 0.5 * obj.hess_abs_sq_bound * rho_phi * rho_phi;
                bound = std::min(bound, std::sqrt(std::max(b2, 0.0)));
            }
            if (have_box && bound > lower) {
                map_point(ball,
                          std::span<const double>(y_c.data(), static_cast<std::size_t>(y_c.size())),
                          phi_c_real, phi_c);
                rad_phi.resize(static_cast<std::size_t>(dphi_real));
                Eigen::Map<Eigen::VectorXd> rp(rad_phi.data(), dphi_real);
                rp = S.Kabs * fr.half;
                for (int j = 0; j < dphi_real; ++j)
                    rad_phi[static_cast<std::size_t>(j)] += std::abs(phi_c_real[static_cast<std::size_t>(j)] -
                                                                     phi_e_real[static_cast<std::size_t>(j)]);
                bound = std::min(bound, obj.box_bound(phi_e, rad_phi));
            }
            if (bound <= lower) continue;
            if (halfdiag <= eta) {
                leaf_bound_max = std::max(leaf_bound_max, bound);
                continue;
            }
            int axis = 0;
            fr.half.maxCoeff(&axis);
            Frame left{fr.center, fr.half};
            left.half(axis) *= 0.5;
            Frame right = left;
            left.center(axis) -= left.half(axis);
            right.center(axis) += right.half(axis);
            stack.push_back(std::move(left));
            stack.push_back(std::move(right));
        }
    }

    const double upper = std::min(lower + posted_width, std::max(lower, leaf_bound_max));
    return CertifiedInterval{lower, upper};
}

}  // namespace symtensor
