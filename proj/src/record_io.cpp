#include "helium/record_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace helium {

std::string format_record(const DensityRecord& r)
{
    return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}", r.index,
                       r.r0.x, r.r0.y, r.v0.x, r.v0.y, r.E, r.M, r.log10_rho, to_string(r.status));
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(std::string_view s)
{
    // strtod handles nan/inf spellings that from_chars on older toolchains may not.
    const std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw std::invalid_argument("bad number: '" + tmp + "'");
    }
    return v;
}

std::size_t parse_index(std::string_view s)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad index: '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

DensityRecord parse_record(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto f = split(line, ',');
    if (f.size() != 9) throw std::invalid_argument("record row must have 9 fields");
    DensityRecord r;
    r.index = parse_index(f[0]);
    r.r0 = {parse_double(f[1]), parse_double(f[2])};
    r.v0 = {parse_double(f[3]), parse_double(f[4])};
    r.E = parse_double(f[5]);
    r.M = parse_double(f[6]);
    r.log10_rho = parse_double(f[7]);
    r.status = density_status_from_string(f[8]);
    return r;
}

RecordScan scan_record_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open record file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    RecordScan scan;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        const std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) break; // torn last line
        const std::string_view line(text.data() + pos, nl - pos);
        if (header) {
            if (line != kRecordHeader) throw IoError("unexpected record header in " + path.string());
            header = false;
        } else {
            DensityRecord r;
            try {
                r = parse_record(line);
            } catch (const std::invalid_argument&) {
                break;
            }
            if (r.index != scan.records.size()) break;
            scan.records.push_back(r);
        }
        pos = nl + 1;
        scan.valid_bytes = pos;
    }
    return scan;
}

std::vector<DensityRecord> read_record_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open record file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kRecordHeader) {
        throw IoError("missing or unexpected record header in " + path.string());
    }
    std::vector<DensityRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(parse_record(line));
        } catch (const std::invalid_argument& e) {
            throw IoError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
        }
    }
    return out;
}

RecordFileWriter RecordFileWriter::create(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create record file " + path.string());
    out << kRecordHeader << '\n';
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
    return RecordFileWriter(std::move(out), path);
}

RecordFileWriter RecordFileWriter::resume(const std::filesystem::path& path,
                                          std::uintmax_t valid_bytes)
{
    std::error_code ec;
    std::filesystem::resize_file(path, valid_bytes, ec);
    if (ec) throw IoError("cannot truncate " + path.string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot reopen record file " + path.string());
    return RecordFileWriter(std::move(out), path);
}

void RecordFileWriter::append(const DensityRecord& r)
{
    out_ << format_record(r) << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed on " + path_.string());
}

void write_histogram_csv(std::ostream& out, const Histogram2D& h)
{
    const double ln10 = std::log(10.0);
    out << kHistogramHeader << '\n';
    for (std::size_t ie = 0; ie < h.bins_e(); ++ie) {
        for (std::size_t im = 0; im < h.bins_m(); ++im) {
            const HistogramCell& c = h.at(ie, im);
            out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", h.e_edges[ie],
                               h.e_edges[ie + 1], h.m_edges[im], h.m_edges[im + 1],
                               c.log_mass / ln10, c.count);
        }
    }
}

void write_histogram_file(const std::filesystem::path& path, const Histogram2D& h)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create histogram file " + path.string());
    write_histogram_csv(out, h);
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

} // namespace helium
