#include "helium/ensemble.hpp"

#include "helium/log_sum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace helium {

unsigned default_workers() noexcept
{
    return std::max(1u, std::thread::hardware_concurrency());
}

void EnsembleConfig::validate() const
{
    if (n_points < 1) throw std::invalid_argument("n_points must be at least 1");
    if (bins_e < 1 || bins_m < 1) throw std::invalid_argument("bin counts must be at least 1");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (e_range && !(e_range->lo < e_range->hi)) throw std::invalid_argument("empty E range");
    if (m_range && !(m_range->lo < m_range->hi)) throw std::invalid_argument("empty M range");
    if (!(run.transient_efolds >= 0.0) || !(run.horizon_periods > 0.0)) {
        throw std::invalid_argument("need transient_efolds >= 0 and horizon_periods > 0");
    }
    params.validate();
    box.validate();
}

std::vector<DensityRecord> run_ensemble(const EnsembleConfig& cfg, const ProgressSink& progress,
                                        const RecordSink& sink, std::size_t first_index)
{
    cfg.validate();
    if (first_index >= cfg.n_points) return {};
    const std::size_t total = cfg.n_points - first_index;

    std::vector<DensityRecord> records(total);
    std::vector<char> ready(total, 0);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t flushed = 0;
    std::size_t done = 0;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            const std::size_t index = first_index + k;
            DensityRecord rec;
            try {
                const ManifoldPoint pt = sample_point(cfg.seed, index, cfg.params, cfg.box);
                rec = point_density(pt, cfg.params, cfg.run, index);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                next.store(total);
                return;
            }

            std::lock_guard lock(mu);
            records[k] = rec;
            ready[k] = 1;
            ++done;
            try {
                while (flushed < total && ready[flushed]) {
                    if (sink) sink(records[flushed]);
                    ++flushed;
                }
                if (progress) progress(done, total);
            } catch (...) {
                if (!error) error = std::current_exception();
                next.store(total);
                return;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(cfg.workers, total));
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
    return records;
}

std::size_t Histogram2D::occupied_cells() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const HistogramCell& c) { return c.count > 0; }));
}

namespace {

std::vector<double> make_edges(Range r, std::size_t bins)
{
    std::vector<double> edges(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        edges[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    edges.back() = r.hi;
    return edges;
}

Range bounding_range(std::span<const DensityRecord> records, double DensityRecord::*field)
{
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& rec : records) {
        if (rec.status != DensityStatus::ok) continue;
        r.lo = std::min(r.lo, rec.*field);
        r.hi = std::max(r.hi, rec.*field);
    }
    if (r.lo == r.hi) {
        r.lo -= 0.5;
        r.hi += 0.5;
    }
    return r;
}

// Bin of x in [lo, hi] split in `bins` equal cells; the upper edge belongs to
// the last cell. Returns bins when x is outside.
std::size_t bin_of(double x, Range r, std::size_t bins)
{
    if (!(x >= r.lo && x <= r.hi)) return bins;
    const double u = (x - r.lo) / (r.hi - r.lo) * static_cast<double>(bins);
    return std::min(static_cast<std::size_t>(u), bins - 1);
}

} // namespace

Histogram2D reduce_histogram(std::span<const DensityRecord> records, const EnsembleConfig& cfg)
{
    const auto ok = std::count_if(records.begin(), records.end(), [](const DensityRecord& r) {
        return r.status == DensityStatus::ok;
    });
    if (ok == 0) throw std::invalid_argument("reduce_histogram: no ok records");
    if (cfg.bins_e < 1 || cfg.bins_m < 1) throw std::invalid_argument("bin counts must be >= 1");

    const Range er = cfg.e_range.value_or(bounding_range(records, &DensityRecord::E));
    const Range mr = cfg.m_range.value_or(bounding_range(records, &DensityRecord::M));

    Histogram2D h;
    h.e_edges = make_edges(er, cfg.bins_e);
    h.m_edges = make_edges(mr, cfg.bins_m);
    h.cells.assign(cfg.bins_e * cfg.bins_m, {});
    std::vector<LogSumAccumulator> mass(h.cells.size());
    LogSumAccumulator overflow_mass;

    const double ln10 = std::log(10.0);
    for (const auto& rec : records) {
        if (rec.status != DensityStatus::ok) continue;
        ++h.ok_records;
        const double log_rho = rec.log10_rho * ln10;
        const std::size_t ie = bin_of(rec.E, er, cfg.bins_e);
        const std::size_t im = bin_of(rec.M, mr, cfg.bins_m);
        if (ie == cfg.bins_e || im == cfg.bins_m) {
            overflow_mass.add(log_rho);
            ++h.overflow.count;
            continue;
        }
        const std::size_t k = ie * cfg.bins_m + im;
        mass[k].add(log_rho);
        ++h.cells[k].count;
    }
    for (std::size_t k = 0; k < mass.size(); ++k) h.cells[k].log_mass = mass[k].value();
    h.overflow.log_mass = overflow_mass.value();
    return h;
}

double mass_concentration(const Histogram2D& h, double fraction)
{
    std::vector<double> logs;
    for (const auto& c : h.cells) {
        if (c.count > 0) logs.push_back(c.log_mass);
    }
    if (logs.empty()) return 0.0;
    std::sort(logs.begin(), logs.end(), std::greater<>());
    const auto top = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(logs.size()))));
    LogSumAccumulator all;
    LogSumAccumulator head;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        all.add(logs[i]);
        if (i < top) head.add(logs[i]);
    }
    return std::exp(head.value() - all.value());
}

} // namespace helium
