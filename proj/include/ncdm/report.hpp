#pragma once

#include "json.hpp"
#include "ncdm/classify.hpp"
#include "ncdm/compressor.hpp"
#include "ncdm/datagen.hpp"
#include "ncdm/ncd.hpp"
#include "ncdm/partition.hpp"

// JSON views of the library's results. Key order is fixed by
// nlohmann::json's sorted objects, so equal results give equal bytes.
namespace ncdm {

nlohmann::json to_json(const NcdValue& v);
nlohmann::json to_json(const NormalityReport& r);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const SplitResult& s);
nlohmann::json to_json(const PartitionNode& node);
nlohmann::json to_json(const PartitionTree& tree);
nlohmann::json to_json(const datagen::CellModelParams& p);

/// Manifest written alongside generated tracks: parameters and per-cell
/// lineage, lifespan, initial radius, length and fate.
nlohmann::json population_manifest(const datagen::CellModelParams& p,
                                   std::span<const datagen::CellTrack> cells,
                                   std::span<const std::string> files);

}  // namespace ncdm
