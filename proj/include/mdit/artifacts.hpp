#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mdit/diversity.hpp"
#include "mdit/embedder.hpp"
#include "mdit/interpolator.hpp"

namespace mdit::artifacts {

// A sample list on disk: hidden.mdt (rows x d, all samples concatenated),
// mass.mdt (rows), labels.mdt (label rows x V) and index.csv locating every
// sample's slice.
void write_sample_store(const std::filesystem::path& dir, std::span<const embedder::EmbeddedSample> samples,
                        std::size_t dim, std::size_t vocab_size);
std::vector<embedder::EmbeddedSample> read_sample_store(const std::filesystem::path& dir);

struct ManifestEntry {
  double lambda = 0.0;
  std::size_t parent_i = 0;
  std::size_t parent_j = 0;
  interpolator::TaskPair tasks;
};

// One JSON object per generated sample: {"lambda", "parent_i", "parent_j", "tasks"}.
void write_manifest(const std::filesystem::path& path, std::span<const interpolator::GeneratedSample> generated);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// "pool_index,provenance,cluster,distance"
void write_selection_csv(const std::filesystem::path& path, const diversity::SelectedSet& selection,
                         const diversity::CandidatePool& pool);
std::vector<std::size_t> read_selection_indices(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mdit::artifacts
