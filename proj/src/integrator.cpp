#include "rah/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace rah {

namespace {

// Dormand & Prince (1980) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(const Vector& v)
{
    return v.allFinite();
}

// Grid points in (from, to], or (from, to) when `inclusive` is false.
void push_grid_samples(std::vector<TimedState>& out, const DenseStep& step, double from, double to, double dt,
                       bool inclusive = true)
{
    if (!(dt > 0.0)) {
        return;
    }
    auto g = static_cast<long long>(std::floor(from / dt)) + 1;
    for (;; ++g) {
        const double tg = static_cast<double>(g) * dt;
        if (tg > to || (!inclusive && tg == to)) {
            break;
        }
        if (tg <= from) {
            continue;
        }
        out.push_back({tg, step(tg)});
    }
}

} // namespace

DenseStep::DenseStep(double t0, double h, Vector y0, Vector y1, Vector r3, Vector r4, Vector r5)
    : t0_(t0), h_(h), y0_(std::move(y0)), y1_(std::move(y1)), r3_(std::move(r3)), r4_(std::move(r4)),
      r5_(std::move(r5))
{
}

Vector DenseStep::operator()(double t) const
{
    if (h_ == 0.0) {
        return y0_;
    }
    if (t <= t0_) {
        return y0_;
    }
    if (t >= t0_ + h_) {
        return y1_;
    }
    const double s = (t - t0_) / h_;
    const double s1 = 1.0 - s;
    return y0_ + s * ((y1_ - y0_) + s1 * (r3_ + s * (r4_ + s1 * r5_)));
}

StepAttempt dopri_step(const FlowField& f, double t0, const Vector& y0, const Vector& k1, double h,
                       const IntegratorSettings& settings)
{
    StepAttempt out;
    const Vector k2 = f(y0 + h * a21 * k1);
    const Vector k3 = f(y0 + h * (a31 * k1 + a32 * k2));
    const Vector k4 = f(y0 + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vector k5 = f(y0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vector k6 = f(y0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    out.y1 = y0 + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    if (!all_finite(k2) || !all_finite(k3) || !all_finite(k4) || !all_finite(k5) || !all_finite(k6) ||
        !all_finite(out.y1)) {
        out.finite = false;
        return out;
    }
    out.k_end = f(out.y1);
    if (!all_finite(out.k_end)) {
        out.finite = false;
        return out;
    }
    const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k_end);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = settings.atol + settings.rtol * std::max(std::abs(y0(i)), std::abs(out.y1(i)));
        const double r = err(i) / scale;
        acc += r * r;
    }
    out.error_norm = err.size() > 0 ? std::sqrt(acc / static_cast<double>(err.size())) : 0.0;

    const Vector ydiff = out.y1 - y0;
    const Vector bspl = h * k1 - ydiff;
    Vector r4 = ydiff - h * out.k_end - bspl;
    Vector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * out.k_end);
    out.dense = DenseStep(t0, h, y0, out.y1, bspl, std::move(r4), std::move(r5));
    return out;
}

EventLocation locate_event(const DenseStep& step, double ta, double tb, const Guard& guard, double tol)
{
    Vector xa = step(ta);
    if (guard(xa)) {
        return {ta, std::move(xa)};
    }
    Vector xb = step(tb);
    if (!guard(xb)) {
        throw std::invalid_argument("locate_event: guard false at the right end of the bracket");
    }
    while (tb - ta > tol) {
        const double tm = 0.5 * (ta + tb);
        if (tm <= ta || tm >= tb) {
            break;
        }
        Vector xm = step(tm);
        if (guard(xm)) {
            tb = tm;
            xb = std::move(xm);
        } else {
            ta = tm;
        }
    }
    return {tb, std::move(xb)};
}

FlowSegment integrate_flow(const Vector& x0, double t0, double t_final, const FlowField& f,
                           const IntegratorSettings& settings, const Guard& guard, const MaxStepFn& max_step,
                           const StepObserver& observer)
{
    FlowSegment seg;
    seg.samples.push_back({t0, x0});
    seg.t_end = t0;
    seg.x_end = x0;
    if (guard && guard(x0)) {
        seg.exit = FlowExit::immediate_event;
        return seg;
    }

    Vector y = x0;
    Vector k = f(y);
    if (!all_finite(k)) {
        throw SimulationError("integrate_flow: non-finite derivative at the initial state");
    }
    double t = t0;
    double h = settings.fixed_step ? settings.fixed_step_size : settings.initial_step;
    const int nsub = std::max(0, settings.guard_subsamples);

    while (t < t_final) {
        double hmax = settings.fixed_step ? settings.fixed_step_size : settings.max_step;
        if (max_step) {
            hmax = std::min(hmax, max_step(y));
        }
        h = std::min({h, hmax, t_final - t});
        if (!settings.fixed_step && h < settings.min_step && t_final - t > settings.min_step) {
            seg.exit = FlowExit::stall;
            seg.t_end = t;
            seg.x_end = y;
            seg.samples.push_back({t, y});
            return seg;
        }

        StepAttempt st = dopri_step(f, t, y, k, h, settings);
        if (!st.finite) {
            if (settings.fixed_step) {
                throw SimulationError("integrate_flow: non-finite state in fixed-step mode");
            }
            h *= 0.25;
            continue;
        }
        if (!settings.fixed_step && st.error_norm > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(st.error_norm, -0.2));
            continue;
        }

        const double t1 = t + h;
        ++seg.steps;

        if (guard) {
            double prev = t;
            bool hit = false;
            double hit_t = t1;
            for (int m = 1; m <= nsub && !hit; ++m) {
                const double tm = t + h * static_cast<double>(m) / static_cast<double>(nsub + 1);
                const Vector ym = st.dense(tm);
                if (observer) {
                    observer(tm, ym);
                }
                if (guard(ym)) {
                    hit = true;
                    hit_t = tm;
                } else {
                    prev = tm;
                }
            }
            if (!hit && guard(st.y1)) {
                hit = true;
                hit_t = t1;
            }
            if (hit) {
                EventLocation ev = locate_event(st.dense, prev, hit_t, guard, settings.event_tol);
                push_grid_samples(seg.samples, st.dense, t, ev.t, settings.sample_interval, false);
                if (observer) {
                    observer(ev.t, ev.x);
                }
                seg.samples.push_back({ev.t, ev.x});
                seg.t_end = ev.t;
                seg.x_end = std::move(ev.x);
                seg.exit = FlowExit::guard;
                return seg;
            }
        } else if (observer) {
            for (int m = 1; m <= nsub; ++m) {
                const double tm = t + h * static_cast<double>(m) / static_cast<double>(nsub + 1);
                observer(tm, st.dense(tm));
            }
        }

        push_grid_samples(seg.samples, st.dense, t, t1, settings.sample_interval);
        if (observer) {
            observer(t1, st.y1);
        }
        t = t1;
        y = std::move(st.y1);
        k = std::move(st.k_end);

        if (!settings.fixed_step) {
            const double fac = st.error_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(st.error_norm, -0.2), 0.2, 5.0);
            h *= fac;
        }
    }

    if (seg.samples.back().t != t) {
        seg.samples.push_back({t, y});
    }
    seg.t_end = t;
    seg.x_end = y;
    seg.exit = FlowExit::budget;
    return seg;
}

} // namespace rah
