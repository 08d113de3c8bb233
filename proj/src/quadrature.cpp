#include "bifree/quadrature.hpp"

#include "bifree/error.hpp"

#include <cmath>
#include <string>

namespace bifree {

namespace {

struct Simpson {
    const std::function<double(double)>& f;
    std::size_t evaluations = 0;

    double eval(double x)
    {
        ++evaluations;
        const double y = f(x);
        if (!std::isfinite(y)) throw ConvergenceError("integrand is not finite at " + std::to_string(x));
        return y;
    }

    // Returns the refined estimate and adds the local error to `error`.
    double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth,
                double& error)
    {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) {
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth <= 0 || m <= a || m >= b) {
            throw ConvergenceError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                                   std::to_string(b) + "]");
        }
        return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, error) +
               step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, error);
    }
};

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth)
{
    QuadResult result;
    if (a == b) return result;
    Simpson s{f};
    const double fa = s.eval(a);
    const double fb = s.eval(b);
    const double fm = s.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double error = 0.0;
    result.value = s.step(a, b, fa, fm, fb, whole, tol, max_depth, error);
    result.error = error;
    result.evaluations = s.evaluations;
    return result;
}

}  // namespace bifree
