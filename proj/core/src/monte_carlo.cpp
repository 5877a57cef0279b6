#include "mpplab/monte_carlo.hpp"

#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mpplab {

bool MonteCarloEstimate::covers(double value, double sigmas) const noexcept
{
    return std::abs(mean - value) <= sigmas * standard_error;
}

MonteCarloEstimate summarize(std::span<const double> samples)
{
    MonteCarloEstimate est;
    est.replications = samples.size();
    if (samples.empty()) return est;
    detail::CompensatedSum sum;
    for (double x : samples) sum.add(x);
    est.mean = sum.value() / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        detail::CompensatedSum sq;
        for (double x : samples) sq.add((x - est.mean) * (x - est.mean));
        const double variance = sq.value() / static_cast<double>(samples.size() - 1);
        est.standard_error = std::sqrt(variance / static_cast<double>(samples.size()));
    }
    return est;
}

unsigned resolve_threads(unsigned requested) noexcept
{
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body)
{
    threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    const std::size_t block = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            const std::size_t lo = std::min(n, w * block);
            const std::size_t hi = std::min(n, lo + block);
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    for (unsigned w = 0; w < threads; ++w) {
        if (errors[w]) std::rethrow_exception(errors[w]);
    }
}

double martingale_at(const Trajectory& traj, const Compensator& comp, MarkId h, double t)
{
    std::size_t count = 0;
    for (const auto& e : traj.events()) {
        if (e.time > t) break;
        if (e.mark == h) ++count;
    }
    return static_cast<double>(count) - compensator_eval(comp, t, h);
}

void martingale_values(const Trajectory& traj, const Compensator& comp, std::span<const double> times,
                       std::span<double> out)
{
    const std::size_t marks = comp.mark_space().size();
    if (out.size() != marks * times.size()) {
        throw std::invalid_argument("martingale_values: output has the wrong size");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("martingale_values: times must be sorted");
    }
    std::fill(out.begin(), out.end(), 0.0);
    const auto events = traj.events();
    std::size_t e = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        for (; e < events.size() && events[e].time <= times[j]; ++e) {
            // counts are cumulative: add this event to every later checkpoint
            for (std::size_t jj = j; jj < times.size(); ++jj) out[events[e].mark.index * times.size() + jj] += 1.0;
        }
    }
    for (std::size_t h = 0; h < marks; ++h) {
        for (std::size_t j = 0; j < times.size(); ++j) {
            out[h * times.size() + j] -= compensator_eval(comp, times[j], MarkId{h});
        }
    }
}

} // namespace mpplab
