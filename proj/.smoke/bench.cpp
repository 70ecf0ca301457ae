#include "symtensor/symtensor.hpp"
#include <cstdio>
#include <random>
#include <chrono>
using namespace symtensor;
int main(int argc, char** argv) {
    double ps[] = {1.0, 1.5, 2.0, 4.0, kInf};
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int casei = 0; casei < 10; ++casei) {
        int m = 3, n = (casei % 2) ? 3 : 2, J = 4;
        double p = ps[casei % 5];
        Space amb = Space::lp(Field::Complex, m, p);
        std::vector<Term> terms;
        for (int j = 0; j < J; ++j) {
            Vector v; v.coords.resize(m);
            for (int k = 0; k < m; ++k) v.coords[k] = Scalar(U(rng), U(rng));
            double nv = norm(amb, v);
            for (auto& c : v.coords) c /= nv;  // unit ambient norm
            terms.push_back(Term{Scalar(U(rng)/J, U(rng)/J), v});
        }
        SymTensor t(n, amb, terms);
        Objective obj = tensor_objective(canonical(t));
        int dim_eff = m * 2;
        double delta = 1e-3 / (obj.lipschitz_bound * std::sqrt((double)dim_eff));
        auto t0 = std::chrono::steady_clock::now();
        auto iv = certified_grid(obj, SearchDomain{amb}, delta);
        auto t1 = std::chrono::steady_clock::now();
        auto res = maximize(obj, SearchDomain{amb});
        auto t2 = std::chrono::steady_clock::now();
        double sگ = std::chrono::duration<double>(t1-t0).count();
        double sm = std::chrono::duration<double>(t2-t1).count();
        bool sandwich = res.lower >= iv.lower - 1e-6 && res.lower <= iv.upper + 1e-6;
        std::printf("case %d p=%4.1f n=%d L=%7.3f grid=[%.8f,%.8f] w=%.2e opt=%.8f sandwich=%d  grid_t=%6.2fs opt_t=%5.3fs\n",
            casei, p, n, obj.lipschitz_bound, iv.lower, iv.upper, iv.upper-iv.lower, res.lower, (int)sandwich, sگ, sm);
        std::fflush(stdout);
    }
    return 0;
}
