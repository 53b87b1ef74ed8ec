#pragma once

#include "helium/kepler.hpp"
#include "helium/measure.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace helium {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
};

unsigned default_workers() noexcept;

struct EnsembleConfig {
    std::size_t n_points = 100000;
    std::uint64_t seed = 1;
    Params params;
    SamplingBox box;
    DensityRunConfig run;
    std::size_t bins_e = 100;
    std::size_t bins_m = 100;
    std::optional<Range> e_range; ///< default: bounding box of the ok records
    std::optional<Range> m_range;
    unsigned workers = default_workers();

    void validate() const;
};

using ProgressSink = std::function<void(std::size_t done, std::size_t total)>;
/// Receives records strictly in index order; calls are serialized.
using RecordSink = std::function<void(const DensityRecord&)>;

/// Computes the records for sample indices [first_index, n_points) on
/// cfg.workers threads. Each index draws from its own random stream, so the
/// result does not depend on the worker count or on scheduling.
std::vector<DensityRecord> run_ensemble(const EnsembleConfig& cfg,
                                        const ProgressSink& progress = {},
                                        const RecordSink& sink = {},
                                        std::size_t first_index = 0);

struct HistogramCell {
    double log_mass = -std::numeric_limits<double>::infinity(); ///< ln sum of rho
    std::size_t count = 0;
};

/// (E, M)-binned reduced density. Cells are stored E-major:
/// cells[ie * bins_m() + im].
struct Histogram2D {
    std::vector<double> e_edges;
    std::vector<double> m_edges;
    std::vector<HistogramCell> cells;
    HistogramCell overflow;
    std::size_t ok_records = 0;

    std::size_t bins_e() const noexcept { return e_edges.size() - 1; }
    std::size_t bins_m() const noexcept { return m_edges.size() - 1; }
    const HistogramCell& at(std::size_t ie, std::size_t im) const
    {
        return cells.at(ie * bins_m() + im);
    }
    std::size_t occupied_cells() const noexcept;
};

/// Accumulates the ok records by (E, M) cell, summing rho in log domain.
/// Records outside the ranges go to the overflow cell. Throws
/// std::invalid_argument if there are no ok records.
Histogram2D reduce_histogram(std::span<const DensityRecord> records, const EnsembleConfig& cfg);

/// Share of the in-range mass carried by the heaviest ceil(fraction * occupied)
/// cells (at least one).
double mass_concentration(const Histogram2D& h, double fraction);

} // namespace helium
