#pragma once

#include "finsler/pathspace.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace finsler {

/// Plain-text geodesic database, one record per line:
///   model-hash  provenance  class  length  energy  index  k  nodes...
/// Fields are tab separated; nodes are 4 coordinates each in %.17g, so a
/// re-loaded record reproduces the stored path bit for bit. Lines starting
/// with '#' are comments.
class GeodesicDatabase {
public:
    explicit GeodesicDatabase(std::string path) : path_(std::move(path)) {}

    const std::string& path() const { return path_; }

    /// Appends; the file is created on first use.
    void append(const ModelManifold& man, const std::vector<GeodesicRecord>& records) const;
    /// Records stored for this model, in file order. Lines of other models are skipped.
    std::vector<GeodesicRecord> load(const ModelManifold& man) const;

private:
    std::string path_;
};

std::string format_record(const ModelManifold& man, const GeodesicRecord& rec);
/// Throws ConfigError on malformed lines or a model mismatch.
GeodesicRecord parse_record(const ModelManifold& man, const std::string& line);

/// Drops records that repeat an earlier (class, energy) pair within tol.
std::vector<GeodesicRecord> deduplicate(std::vector<GeodesicRecord> records, double tol);

} // namespace finsler
