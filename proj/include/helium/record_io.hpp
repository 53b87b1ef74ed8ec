#pragma once

#include "helium/ensemble.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace helium {

/// I/O failure on a record, histogram or manifest file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kRecordHeader = "index,r_x,r_y,v_x,v_y,E,M,log10_rho,status";
inline constexpr std::string_view kHistogramHeader = "E_lo,E_hi,M_lo,M_hi,log10_mass,count";

/// One CSV row (no newline); reals with 17 significant digits.
std::string format_record(const DensityRecord& r);
/// Throws std::invalid_argument on a malformed row.
DensityRecord parse_record(std::string_view line);

struct RecordScan {
    std::vector<DensityRecord> records; ///< indices 0, 1, 2, ... in order
    std::uintmax_t valid_bytes = 0;     ///< byte length of the valid prefix
};

/// Reads the longest valid prefix of a record file: the header and complete,
/// newline-terminated rows with consecutive indices from 0. A torn last line
/// (interrupted write) is excluded.
RecordScan scan_record_file(const std::filesystem::path& path);

/// Reads a complete record file; throws IoError on any malformed content.
std::vector<DensityRecord> read_record_file(const std::filesystem::path& path);

/// Append-only record file. Each row is flushed as soon as it is written.
class RecordFileWriter {
public:
    /// Creates (truncating) the file and writes the header.
    static RecordFileWriter create(const std::filesystem::path& path);
    /// Reopens for appending after truncating to `valid_bytes`.
    static RecordFileWriter resume(const std::filesystem::path& path, std::uintmax_t valid_bytes);

    void append(const DensityRecord& r);

private:
    explicit RecordFileWriter(std::ofstream out, std::filesystem::path path)
        : out_(std::move(out)), path_(std::move(path)) {}
    std::ofstream out_;
    std::filesystem::path path_;
};

void write_histogram_csv(std::ostream& out, const Histogram2D& h);
void write_histogram_file(const std::filesystem::path& path, const Histogram2D& h);

} // namespace helium
