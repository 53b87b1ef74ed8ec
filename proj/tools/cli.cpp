#include "cli.hpp"

#include "helium/config.hpp"
#include "helium/ensemble.hpp"
#include "helium/integrator.hpp"
#include "helium/kepler.hpp"
#include "helium/measure.hpp"
#include "helium/record_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

namespace helium::cli {

namespace {

namespace fs = std::filesystem;

using Pair = std::array<double, 2>;

Vec2 to_vec(const Pair& p) { return {p[0], p[1]}; }

/// Flags shared by every subcommand that builds a configuration.
struct CommonFlags {
    std::string config_path;
    std::optional<double> epsilon;
    std::optional<double> h0;

    void attach(CLI::App* app)
    {
        app->add_option("--config", config_path, "flat JSON configuration file");
        app->add_option("--epsilon", epsilon, "radiation-reaction time scale");
        app->add_option("--h0", h0, "base integration step");
    }

    /// defaults < file < flags
    EnsembleConfig resolve() const
    {
        EnsembleConfig cfg = config_path.empty() ? EnsembleConfig{} : load_config_file(config_path);
        if (epsilon) cfg.params.eps = *epsilon;
        if (h0) cfg.params.h0 = *h0;
        return cfg;
    }
};

struct OrbitFlags {
    CommonFlags common;
    Pair r0{}, v0{}, xcm{}, vcm{}, acm{};
    double duration = 0.0;
    std::string direction = "forward";
    std::string out;
};

struct DensityFlags {
    CommonFlags common;
    Pair r0{}, v0{};
};

struct EnsembleFlags {
    CommonFlags common;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_points;
    std::optional<unsigned> workers;
    std::string out;
    bool resume = false;
    bool quiet = false;
};

struct HistogramFlags {
    CommonFlags common;
    std::string records;
    std::string out;
    std::optional<std::size_t> bins_e, bins_m;
    std::vector<double> e_range, m_range;
};

double safe(double (*fn)(const PhaseState&, const Params&), const PhaseState& s, const Params& p)
{
    try {
        return fn(s, p);
    } catch (const CollisionError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

int cmd_orbit(const OrbitFlags& f, std::ostream& err)
{
    const EnsembleConfig cfg = f.common.resolve();
    const Params& p = cfg.params;
    p.validate();
    if (f.duration < 0.0) {
        err << "orbit: duration must be non-negative\n";
        return kIoError;
    }
    const Direction dir = f.direction == "backward" ? Direction::backward : Direction::forward;

    std::ofstream out(f.out, std::ios::binary | std::ios::trunc);
    if (!out) {
        err << "orbit: cannot create " << f.out << '\n';
        return kIoError;
    }
    out << "t,r_x,r_y,v_x,v_y,xcm_x,xcm_y,vcm_x,vcm_y,acm_x,acm_y,E_mech,E_total,M\n";
    if (f.duration == 0.0) return out ? kOk : kIoError;

    const PhaseState s0{to_vec(f.r0), to_vec(f.v0), to_vec(f.xcm), to_vec(f.vcm), to_vec(f.acm)};
    const SampleSink sink = [&](const TrajectorySample& smp) {
        const StateVector x = smp.state.flatten();
        out << fmt::format("{:.17g}", smp.t);
        for (double c : x) out << fmt::format(",{:.17g}", c);
        out << fmt::format(",{:.17g},{:.17g},{:.17g}\n", safe(mechanical_energy, smp.state, p),
                           safe(total_energy, smp.state, p), angular_momentum(smp.state, p));
    };
    const IntegrationResult res = integrate(s0, f.duration, dir, p, sink);
    out.flush();
    if (!out) {
        err << "orbit: write failed on " << f.out << '\n';
        return kIoError;
    }
    if (res.reason != StopReason::completed) {
        err << "orbit: stopped at t = " << direction_sign(dir) * res.elapsed
            << ", reason: " << to_string(res.reason) << '\n';
        return kDynamicsFailure;
    }
    return kOk;
}

int cmd_density(const DensityFlags& f, std::ostream& out)
{
    const EnsembleConfig cfg = f.common.resolve();
    cfg.params.validate();
    const DensityRecord rec =
        point_density({to_vec(f.r0), to_vec(f.v0)}, cfg.params, cfg.run, 0);
    out << format_record(rec) << '\n';
    switch (rec.status) {
    case DensityStatus::ok: return kOk;
    case DensityStatus::degenerate: return kDegenerateInput;
    default: return kDynamicsFailure;
    }
}

fs::path manifest_path_for(const fs::path& records)
{
    fs::path m = records;
    m.replace_extension(".manifest.json");
    return m;
}

int cmd_ensemble(const EnsembleFlags& f, std::ostream& err)
{
    EnsembleConfig cfg = f.common.resolve();
    if (f.seed) cfg.seed = *f.seed;
    if (f.n_points) cfg.n_points = *f.n_points;
    if (f.workers) cfg.workers = *f.workers;
    cfg.validate();

    const fs::path out = f.out;
    const fs::path manifest_path = manifest_path_for(out);
    const nlohmann::json manifest = make_manifest(cfg);

    std::optional<RecordFileWriter> writer;
    std::size_t first = 0;
    if (f.resume && fs::exists(out)) {
        nlohmann::json previous;
        std::ifstream min(manifest_path);
        try {
            min >> previous;
        } catch (const std::exception&) {
            err << "ensemble: cannot read manifest " << manifest_path << " to resume\n";
            return kIoError;
        }
        if (!manifests_compatible(previous, manifest)) {
            err << "ensemble: " << out << " was produced with a different configuration\n";
            return kIoError;
        }
        const RecordScan scan = scan_record_file(out);
        first = std::min(scan.records.size(), cfg.n_points);
        writer.emplace(RecordFileWriter::resume(out, scan.valid_bytes));
        err << "ensemble: resuming at index " << first << '\n';
    } else {
        writer.emplace(RecordFileWriter::create(out));
    }
    {
        std::ofstream mout(manifest_path, std::ios::trunc);
        mout << manifest.dump(2) << '\n';
        if (!mout) {
            err << "ensemble: cannot write manifest " << manifest_path << '\n';
            return kIoError;
        }
    }

    std::array<std::size_t, 4> status_counts{};
    const std::size_t total = cfg.n_points - first;
    const std::size_t every = std::max<std::size_t>(1, total / 100);
    const ProgressSink progress = [&](std::size_t done, std::size_t all) {
        if (!f.quiet && (done % every == 0 || done == all)) {
            err << fmt::format("ensemble: {}/{}\n", done, all);
        }
    };
    const RecordSink sink = [&](const DensityRecord& r) {
        writer->append(r);
        ++status_counts[static_cast<std::size_t>(r.status)];
    };
    run_ensemble(cfg, progress, sink, first);

    err << fmt::format("ensemble: wrote {} records (ok {}, collision {}, degenerate {}, failed {})\n",
                       total, status_counts[0], status_counts[1], status_counts[2],
                       status_counts[3]);
    return kOk;
}

int cmd_histogram(const HistogramFlags& f, std::ostream& err)
{
    EnsembleConfig cfg = f.common.resolve();
    if (f.bins_e) cfg.bins_e = *f.bins_e;
    if (f.bins_m) cfg.bins_m = *f.bins_m;
    if (f.e_range.size() == 2) cfg.e_range = Range{f.e_range[0], f.e_range[1]};
    if (f.m_range.size() == 2) cfg.m_range = Range{f.m_range[0], f.m_range[1]};
    cfg.validate();

    const std::vector<DensityRecord> records = read_record_file(f.records);
    Histogram2D h;
    try {
        h = reduce_histogram(records, cfg);
    } catch (const std::invalid_argument& e) {
        err << "histogram: " << e.what() << '\n';
        return kDegenerateInput;
    }
    write_histogram_file(f.out, h);
    err << fmt::format("histogram: {} ok records, {} occupied cells, {} in overflow, "
                       "top 1% of cells hold {:.6f} of the mass\n",
                       h.ok_records, h.occupied_cells(), h.overflow.count,
                       mass_concentration(h, 0.01));
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Classical helium with radiation reaction: orbits and invariant density"};
    app.name("helium");
    app.require_subcommand(1);

    OrbitFlags orbit;
    CLI::App* orbit_cmd = app.add_subcommand("orbit", "integrate one trajectory to CSV");
    orbit.common.attach(orbit_cmd);
    orbit_cmd->add_option("--r0", orbit.r0, "relative position")->required();
    orbit_cmd->add_option("--v0", orbit.v0, "relative velocity")->required();
    orbit_cmd->add_option("--xcm", orbit.xcm, "center-of-mass position");
    orbit_cmd->add_option("--vcm", orbit.vcm, "center-of-mass velocity");
    orbit_cmd->add_option("--acm", orbit.acm, "center-of-mass acceleration");
    orbit_cmd->add_option("--duration", orbit.duration, "integration time")->required();
    orbit_cmd->add_option("--direction", orbit.direction, "forward or backward")
        ->check(CLI::IsMember({"forward", "backward"}));
    orbit_cmd->add_option("--out", orbit.out, "trajectory CSV")->required();

    DensityFlags density;
    CLI::App* density_cmd = app.add_subcommand("density", "density at one manifold point");
    density.common.attach(density_cmd);
    density_cmd->add_option("--r0", density.r0, "relative position")->required();
    density_cmd->add_option("--v0", density.v0, "relative velocity")->required();

    EnsembleFlags ensemble;
    CLI::App* ensemble_cmd = app.add_subcommand("ensemble", "density over sampled points");
    ensemble.common.attach(ensemble_cmd);
    ensemble_cmd->add_option("--seed", ensemble.seed, "random seed");
    ensemble_cmd->add_option("--n-points", ensemble.n_points, "number of sample points");
    ensemble_cmd->add_option("--workers", ensemble.workers, "worker threads");
    ensemble_cmd->add_option("--out", ensemble.out, "record CSV")->required();
    ensemble_cmd->add_flag("--resume", ensemble.resume, "continue a partial record file");
    ensemble_cmd->add_flag("--quiet", ensemble.quiet, "no progress lines");

    HistogramFlags histogram;
    CLI::App* histogram_cmd = app.add_subcommand("histogram", "reduce records to (E, M) cells");
    histogram.common.attach(histogram_cmd);
    histogram_cmd->add_option("--records", histogram.records, "record CSV")->required();
    histogram_cmd->add_option("--out", histogram.out, "histogram CSV")->required();
    histogram_cmd->add_option("--bins-e", histogram.bins_e, "energy bins");
    histogram_cmd->add_option("--bins-m", histogram.bins_m, "angular momentum bins");
    histogram_cmd->add_option("--e-range", histogram.e_range, "energy range")->expected(2);
    histogram_cmd->add_option("--m-range", histogram.m_range, "angular momentum range")
        ->expected(2);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "helium: " << e.what() << '\n';
        return kIoError;
    }

    try {
        if (orbit_cmd->parsed()) return cmd_orbit(orbit, err);
        if (density_cmd->parsed()) return cmd_density(density, out);
        if (ensemble_cmd->parsed()) return cmd_ensemble(ensemble, err);
        return cmd_histogram(histogram, err);
    } catch (const IoError& e) {
        err << "helium: " << e.what() << '\n';
        return kIoError;
    } catch (const std::invalid_argument& e) {
        err << "helium: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        err << "helium: " << e.what() << '\n';
        return kDynamicsFailure;
    }
}

} // namespace helium::cli
