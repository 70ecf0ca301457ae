#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "symtensor/scalars.hpp"

namespace symtensor {

/// Element of a space, stored in the coordinates of that space.
struct Vector {
    std::vector<Scalar> coords;

    Vector() = default;
    explicit Vector(std::vector<Scalar> c) : coords(std::move(c)) {}
    Vector(std::initializer_list<Scalar> c) : coords(c) {}

    std::size_t size() const { return coords.size(); }
    Scalar& operator[](std::size_t i) { return coords[i]; }
    Scalar operator[](std::size_t i) const { return coords[i]; }

    friend bool operator==(const Vector&, const Vector&) = default;
};

/// Element of the dual, stored in dual coordinates.  The pairing with a
/// Vector is bilinear; conjugation never happens implicitly.
struct Functional {
    std::vector<Scalar> coords;

    Functional() = default;
    explicit Functional(std::vector<Scalar> c) : coords(std::move(c)) {}
    Functional(std::initializer_list<Scalar> c) : coords(c) {}

    std::size_t size() const { return coords.size(); }
    Scalar& operator[](std::size_t i) { return coords[i]; }
    Scalar operator[](std::size_t i) const { return coords[i]; }

    friend bool operator==(const Functional&, const Functional&) = default;
};

/// Bilinear pairing <phi, x> = sum_k phi_k x_k.
inline Scalar pair(const Functional& phi, const Vector& x) {
    if (phi.size() != x.size())
        throw InputError("pair: functional has length " + std::to_string(phi.size()) +
                         ", vector has length " + std::to_string(x.size()));
    Scalar s(0.0, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) s += phi.coords[k] * x.coords[k];
    return s;
}

inline double euclid_norm(std::span<const Scalar> v) {
    double s = 0.0;
    for (const Scalar& z : v) s += std::norm(z);
    return std::sqrt(s);
}

class Space;
using SpacePtr = std::shared_ptr<const Space>;

struct LpKind {
    double p;  // in [1, inf]
};

struct PolytopeKind {
    std::vector<Functional> generators;  // norm(x) = max_i |<gen_i, x>|
};

struct SubspaceKind {
    SpacePtr host;
    std::vector<Vector> basis;  // host coordinates, linearly independent
};

/// Finite-dimensional normed space over R or C.  Three norm families:
/// Lp, polytope (max of pairings against a spanning generator set), and
/// subspace (host norm restricted to a span, in basis coordinates).
class Space {
  public:
    static Space lp(Field field, int dim, double p) {
        if (dim < 1) throw InputError("space dimension must be positive");
        if (!(p >= 1.0)) throw InputError("lp exponent must satisfy p >= 1");
        return Space(field, dim, LpKind{p});
    }

    static Space euclidean(Field field, int dim) { return lp(field, dim, 2.0); }

    static Space polytope(Field field, int dim, std::vector<Functional> generators) {
        if (dim < 1) throw InputError("space dimension must be positive");
        if (generators.empty()) throw InputError("polytope space needs generators");
        for (const auto& g : generators)
            if (static_cast<int>(g.size()) != dim)
                throw InputError("polytope generator has wrong length");
        // Spanning check: otherwise max |<gen, x>| is only a seminorm.
        Eigen::MatrixXcd G(generators.size(), dim);
        for (std::size_t i = 0; i < generators.size(); ++i)
            for (int j = 0; j < dim; ++j) G(static_cast<Eigen::Index>(i), j) = generators[i][j];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(G);
        qr.setThreshold(1e-12);
        if (qr.rank() < dim)
            throw InputError("polytope generators do not span the dual space");
        return Space(field, dim, PolytopeKind{std::move(generators)});
    }

    static Space subspace(Space host, std::vector<Vector> basis) {
        if (basis.empty()) throw InputError("subspace needs a basis");
        const int hd = host.dim();
        if (static_cast<int>(basis.size()) > hd)
            throw InputError("subspace basis larger than host dimension");
        Eigen::MatrixXcd B(hd, basis.size());
        for (std::size_t j = 0; j < basis.size(); ++j) {
            if (static_cast<int>(basis[j].size()) != hd)
                throw InputError("subspace basis vector has wrong length");
            for (int i = 0; i < hd; ++i) B(i, static_cast<Eigen::Index>(j)) = basis[j][static_cast<std::size_t>(i)];
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(B);
        qr.setThreshold(1e-12);
        if (qr.rank() < static_cast<Eigen::Index>(basis.size()))
            throw InputError("subspace basis is linearly dependent");
        const Field f = host.field();
        const int d = static_cast<int>(basis.size());
        return Space(f, d, SubspaceKind{std::make_shared<Space>(std::move(host)), std::move(basis)});
    }

    Field field() const { return field_; }
    int dim() const { return dim_; }

    bool is_lp() const { return std::holds_alternative<LpKind>(kind_); }
    bool is_polytope() const { return std::holds_alternative<PolytopeKind>(kind_); }
    bool is_subspace() const { return std::holds_alternative<SubspaceKind>(kind_); }

    double lp_exponent() const {
        const auto* k = std::get_if<LpKind>(&kind_);
        if (!k) throw InputError("space is not an lp space");
        return k->p;
    }
    bool is_euclidean() const { return is_lp() && lp_exponent() == 2.0; }

    const PolytopeKind& as_polytope() const { return std::get<PolytopeKind>(kind_); }
    const SubspaceKind& as_subspace() const { return std::get<SubspaceKind>(kind_); }

    friend bool operator==(const Space& a, const Space& b) {
        if (a.field_ != b.field_ || a.dim_ != b.dim_ || a.kind_.index() != b.kind_.index())
            return false;
        if (a.is_lp()) return a.lp_exponent() == b.lp_exponent();
        if (a.is_polytope()) return a.as_polytope().generators == b.as_polytope().generators;
        const auto& sa = a.as_subspace();
        const auto& sb = b.as_subspace();
        return sa.basis == sb.basis && *sa.host == *sb.host;
    }

  private:
    Space(Field f, int d, std::variant<LpKind, PolytopeKind, SubspaceKind> k)
        : field_(f), dim_(d), kind_(std::move(k)) {}

    Field field_;
    int dim_;
    std::variant<LpKind, PolytopeKind, SubspaceKind> kind_;
};

inline void check_dim(const Space& s, std::size_t len, const char* what) {
    if (static_cast<int>(len) != s.dim())
        throw InputError(std::string(what) + ": length " + std::to_string(len) +
                         " does not match space dimension " + std::to_string(s.dim()));
}

inline double lp_norm_of_moduli(std::span<const Scalar> v, double p) {
    if (p == kInf) {
        double m = 0.0;
        for (const Scalar& z : v) m = std::max(m, std::abs(z));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (const Scalar& z : v) s += std::abs(z);
        return s;
    }
    if (p == 2.0) return euclid_norm(v);
    double s = 0.0;
    for (const Scalar& z : v) s += std::pow(std::abs(z), p);
    return std::pow(s, 1.0 / p);
}

/// Coordinates of a subspace element in its host space.
inline Vector host_coordinates(const Space& s, const Vector& x) {
    const auto& sub = s.as_subspace();
    Vector out;
    out.coords.assign(static_cast<std::size_t>(sub.host->dim()), Scalar(0.0, 0.0));
    for (std::size_t j = 0; j < sub.basis.size(); ++j)
        for (std::size_t i = 0; i < out.coords.size(); ++i)
            out.coords[i] += x.coords[j] * sub.basis[j].coords[i];
    return out;
}

/// Norm of x in the space s.
inline double norm(const Space& s, const Vector& x) {
    check_dim(s, x.size(), "norm");
    if (s.is_lp()) return lp_norm_of_moduli(x.coords, s.lp_exponent());
    if (s.is_polytope()) {
        double m = 0.0;
        for (const auto& g : s.as_polytope().generators) m = std::max(m, std::abs(pair(g, x)));
        return m;
    }
    const auto& sub = s.as_subspace();
    return norm(*sub.host, host_coordinates(s, x));
}

/// Hölder conjugate exponent, with the p = 1 and p = inf branches explicit.
inline double holder_conjugate(double p) {
    if (p == 1.0) return kInf;
    if (p == kInf) return 1.0;
    return p / (p - 1.0);
}

/// Linear map between spaces, stored as a codomain.dim x domain.dim matrix
/// acting on coordinates.
struct LinearMap {
    Eigen::MatrixXcd matrix;
    Space domain;
    Space codomain;

    LinearMap(Eigen::MatrixXcd m, Space dom, Space cod)
        : matrix(std::move(m)), domain(std::move(dom)), codomain(std::move(cod)) {
        if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim())
            throw InputError("linear map matrix shape does not match its spaces");
    }
};

inline Vector apply(const LinearMap& T, const Vector& x) {
    check_dim(T.domain, x.size(), "apply");
    Vector out;
    out.coords.assign(static_cast<std::size_t>(T.matrix.rows()), Scalar(0.0, 0.0));
    for (Eigen::Index i = 0; i < T.matrix.rows(); ++i) {
        Scalar s(0.0, 0.0);
        for (Eigen::Index j = 0; j < T.matrix.cols(); ++j)
            s += T.matrix(i, j) * x.coords[static_cast<std::size_t>(j)];
        out.coords[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

/// T^* phi with the bilinear pairing: plain transpose, no conjugation, so
/// that pair(adjoint_apply(T, phi), x) = pair(phi, apply(T, x)).
inline Functional adjoint_apply(const LinearMap& T, const Functional& phi) {
    check_dim(T.codomain, phi.size(), "adjoint_apply");
    Functional out;
    out.coords.assign(static_cast<std::size_t>(T.matrix.cols()), Scalar(0.0, 0.0));
    for (Eigen::Index j = 0; j < T.matrix.cols(); ++j) {
        Scalar s(0.0, 0.0);
        for (Eigen::Index i = 0; i < T.matrix.rows(); ++i)
            s += T.matrix(i, j) * phi.coords[static_cast<std::size_t>(i)];
        out.coords[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

/// The adjoint as a map object.  It acts between dual coordinate systems;
/// the attached spaces record where the coordinates came from.
inline LinearMap adjoint(const LinearMap& T) {
    return LinearMap(T.matrix.transpose(), T.codomain, T.domain);
}

inline LinearMap inverse(const LinearMap& T) {
    if (T.matrix.rows() != T.matrix.cols()) throw InputError("inverse: map is not square");
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(T.matrix);
    if (!lu.isInvertible()) throw InputError("inverse: map is singular");
    return LinearMap(lu.inverse(), T.codomain, T.domain);
}

inline LinearMap identity_map(const Space& dom, const Space& cod) {
    if (dom.dim() != cod.dim()) throw InputError("identity_map: dimension mismatch");
    return LinearMap(Eigen::MatrixXcd::Identity(dom.dim(), dom.dim()), dom, cod);
}

/// Realify a complex matrix acting on interleaved [re, im] coordinates;
/// for the real field this is just the real part (imag must be zero).
inline Eigen::MatrixXd realify(const Eigen::MatrixXcd& M, Field f) {
    if (f == Field::Real) return M.real();
    Eigen::MatrixXd R(2 * M.rows(), 2 * M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            const Scalar z = M(i, j);
            R(2 * i, 2 * j) = z.real();
            R(2 * i, 2 * j + 1) = -z.imag();
            R(2 * i + 1, 2 * j) = z.imag();
            R(2 * i + 1, 2 * j + 1) = z.real();
        }
    return R;
}

/// Gram-Schmidt with the Hermitian inner product of the host Euclidean
/// space; returns an orthonormal basis of the same span.
inline std::vector<Vector> orthonormalize(const std::vector<Vector>& basis) {
    std::vector<Vector> out;
    for (const Vector& b : basis) {
        Vector v = b;
        for (const Vector& u : out) {
            Scalar proj(0.0, 0.0);
            for (std::size_t k = 0; k < v.size(); ++k) proj += v.coords[k] * std::conj(u.coords[k]);
            for (std::size_t k = 0; k < v.size(); ++k) v.coords[k] -= proj * u.coords[k];
        }
        const double nv = euclid_norm(v.coords);
        if (nv < 1e-12) throw InputError("orthonormalize: vectors are linearly dependent");
        for (auto& c : v.coords) c /= nv;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace symtensor
