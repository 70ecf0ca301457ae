#include "symtensor/symtensor.hpp"
#include <cstdio>
using namespace symtensor;
int main() {
    Space l2 = Space::lp(Field::Real, 2, 2.0);
    Vector x{Scalar(3,0), Scalar(4,0)};
    std::printf("norm=%.12f\n", norm(l2, x));
    Functional phi{Scalar(3,0), Scalar(4,0)};
    std::printf("dual=%.12f\n", dual_norm(l2, phi));
    // maximize |<phi,(1,0)>| over dual ball of l2
    Functional e1{Scalar(1,0), Scalar(0,0)};
    Vector v1{Scalar(1,0), Scalar(0,0)};
    SymTensor t(1, l2, {Term{Scalar(1,0), v1}});
    auto res = injective_norm(t);
    std::printf("inj lower=%.12f maximizer=(%.6f,%.6f)\n", res.lower,
                res.maximizer[0].real(), res.maximizer[1].real());
    // l1 regression: e1(x)e1 - e2(x)e2 over l1^2, dual ball = cube, sup = 1 at (1,0)
    Space l1 = Space::lp(Field::Real, 2, 1.0);
    SymTensor t2(2, l1, {Term{Scalar(1,0), Vector{Scalar(1,0),Scalar(0,0)}},
                         Term{Scalar(-1,0), Vector{Scalar(0,0),Scalar(1,0)}}});
    InjectiveNormOptions o; o.certify = true;
    auto r2 = injective_norm(t2, o);
    std::printf("regression lower=%.12f upper=%.12f\n", r2.lower, r2.upper.value());
    // certified grid example: phi1^2 on l2^2, delta=0.01 -> contains 1, width <= 0.05
    SymTensor t3(2, l2, {Term{Scalar(1,0), Vector{Scalar(1,0),Scalar(0,0)}}});
    auto iv = certified_grid(tensor_objective(t3), SearchDomain{l2}, 0.01);
    std::printf("grid lo=%.9f hi=%.9f width=%.9f\n", iv.lower, iv.upper, iv.upper-iv.lower);
    // complex pair test: ((i,0),(i,0)) -> -1
    Functional fi{Scalar(0,1), Scalar(0,0)};
    Vector vi{Scalar(0,1), Scalar(0,0)};
    Scalar pr = pair(fi, vi);
    std::printf("pair=(%.3f,%.3f)\n", pr.real(), pr.imag());
    return 0;
}
