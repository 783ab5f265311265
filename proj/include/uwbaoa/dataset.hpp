#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uwbaoa/channel.hpp"

namespace uwbaoa {

enum class DatasetSource { synthetic, imported };

struct DatasetManifest {
    std::size_t record_count = 0;
    std::size_t kept_count = 0;
    std::map<std::string, std::size_t> filter_counts;
    std::uint64_t split_seed = 0;
    DatasetSource source = DatasetSource::synthetic;

    std::size_t dropped_count() const;
    std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);
};

struct FilterConfig {
    double tdoa_max = 1e-9;      // seconds, |tdoa| above this is dropped
    double twr_min_raw = 1000.0; // device ticks of (round_trip - reply)
};

inline constexpr const char* kFilterTdoaMax = "tdoa_max";
inline constexpr const char* kFilterTwrMin = "twr_min";

struct FilterResult {
    std::vector<MeasurementRecord> kept;
    DatasetManifest manifest;
};

/// Drops records that violate either rule. A record violating both is
/// counted once, under the TDoA rule, so kept + dropped == total.
FilterResult apply_quality_filters(std::span<const MeasurementRecord> records,
                                   const FilterConfig& config = {});

enum class Stratify { none, angle_zone, distance };

struct SplitSpec {
    double train_fraction = 0.6;
    Stratify stratify_by = Stratify::none;
    std::uint64_t seed = 0;
    /// Keep repetitions of one pose on the same side where the quota allows.
    bool group_by_pose = true;
};

struct Split {
    std::vector<std::size_t> train;  // ascending record indices
    std::vector<std::size_t> test;
};

/// |train| = round(fraction * N); each stratum receives floor or ceil of its
/// proportional share. Deterministic for a fixed seed.
Split split(std::span<const MeasurementRecord> records, const SplitSpec& spec);

std::vector<MeasurementRecord> select(std::span<const MeasurementRecord> records,
                                      std::span<const std::size_t> indices);

// Canonical dataset text format: a version line, a tab-separated header, then
// one record per line. CIRs are base64 of little-endian float64 re/im pairs.

void write_records(std::span<const MeasurementRecord> records, std::ostream& out);
void write_records(std::span<const MeasurementRecord> records, const std::filesystem::path& path);

struct ReadOptions {
    /// Reject columns the reader does not know.
    bool strict = true;
};

std::vector<MeasurementRecord> read_records(std::istream& in, const ReadOptions& options = {});
std::vector<MeasurementRecord> read_records(const std::filesystem::path& path,
                                            const ReadOptions& options = {});

/// Maps canonical fields to columns of an external CSV capture.
///
/// File syntax, one entry per line, '#' starts a comment:
///   delimiter = ,
///   <field> = <column> [* <scale>] [+ <offset>]
///   <field> = const <value>
/// CIR fields (cir_a_real, cir_a_imag, cir_b_real, cir_b_imag) name a column
/// pattern containing "{i}", expanded for sample indices 0..511.
struct ImportMapping {
    struct Column {
        std::string column;
        double scale = 1.0;
        double offset = 0.0;
        bool is_constant = false;
        double constant = 0.0;
    };

    char delimiter = ',';
    std::map<std::string, Column> fields;

    static ImportMapping parse(std::istream& in);
    static ImportMapping load(const std::filesystem::path& path);

    /// Fields that must be mapped.
    static const std::vector<std::string>& required_fields();
    /// Every field the importer understands.
    static const std::vector<std::string>& known_fields();
};

/// Reads an external CSV with a header row. Poses are grouped by
/// (true_distance, true_aoa) when no pose_id column is mapped.
std::vector<MeasurementRecord> import_records(std::istream& csv, const ImportMapping& mapping);
std::vector<MeasurementRecord> import_records(const std::filesystem::path& csv_path,
                                              const ImportMapping& mapping);

}  // namespace uwbaoa
