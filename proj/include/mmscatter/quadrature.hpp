#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "errors.hpp"

namespace mmscatter {

struct QuadratureOptions
{
    double abs_tolerance = 1e-8;
    std::size_t max_evaluations = 2'000'000;
    int min_depth = 4;
    int max_depth = 50;
};

namespace detail {

template<class F>
class AdaptiveSimpson
{
  public:
    AdaptiveSimpson(F const& f, QuadratureOptions const& opts) : f_(f), opts_(opts) {}

    double integrate(double a, double b, double tol)
    {
        double const fa = eval(a);
        double const fb = eval(b);
        double const m = 0.5 * (a + b);
        double const fm = eval(m);
        double const whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, tol, 0);
    }

    std::size_t evaluations() const { return evals_; }

  private:
    double eval(double x)
    {
        if (++evals_ > opts_.max_evaluations)
            throw NumericalError("adaptive quadrature exceeded its evaluation budget");
        return f_(x);
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth)
    {
        double const m = 0.5 * (a + b);
        double const lm = 0.5 * (a + m);
        double const rm = 0.5 * (m + b);
        double const flm = eval(lm);
        double const frm = eval(rm);
        double const left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double const right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double const delta = left + right - whole;
        if (depth >= opts_.min_depth && std::abs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        if (depth >= opts_.max_depth)
            throw NumericalError("adaptive quadrature exceeded its recursion depth");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
               + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    F const& f_;
    QuadratureOptions opts_;
    std::size_t evals_ = 0;
};

}  // namespace detail

/// Adaptive Simpson integration of f over [a, b].
///
/// The absolute tolerance is split in proportion to sub-interval length, so
/// callers with known kinks should pass them through `breakpoints` rather
/// than relying on refinement to find them.
template<class F>
double adaptive_simpson(F const& f, double a, double b, QuadratureOptions const& opts = {},
                        std::initializer_list<double> breakpoints = {})
{
    std::vector<double> nodes{a};
    for (double p : breakpoints)
        if (p > nodes.back() && p < b)
            nodes.push_back(p);
    nodes.push_back(b);

    detail::AdaptiveSimpson<F> engine(f, opts);
    double total = 0.0;
    double const span = b - a;
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
    {
        double const lo = nodes[k];
        double const hi = nodes[k + 1];
        if (hi <= lo)
            continue;
        total += engine.integrate(lo, hi, opts.abs_tolerance * (hi - lo) / span);
    }
    return total;
}

}  // namespace mmscatter
