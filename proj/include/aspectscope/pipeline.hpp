#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aspectscope/aspect.hpp"
#include "aspectscope/corpus.hpp"
#include "aspectscope/lda.hpp"
#include "aspectscope/store.hpp"
#include "aspectscope/tsne.hpp"
#include "aspectscope/vocabulary.hpp"

// Batch steps behind the CLI: ingest, annotate, train all slots.
namespace aspectscope {

IngestReport ingest_file(const std::filesystem::path& metadata_csv,
                         const std::filesystem::path& snapshot_out,
                         const IngestOptions& options = {});

// Sentences and their labels for every paper, parallel to the corpus.
struct AnnotatedCorpus {
  std::vector<std::vector<Sentence>> sentences;
  AspectAssignments labels;
};

// Imported label overrides win; every other sentence goes through the model
// with position = index / sentence count.
AnnotatedCorpus annotate(const Corpus& corpus, const AspectModel& model);

// Tokens of each paper's in-scope sentences, restricted to covid papers for
// covid slots. Papers without in-scope sentences are left out.
std::vector<TokenizedDoc> slot_documents(const Corpus& corpus, const AnnotatedCorpus& annotated,
                                         SlotId slot);

// Labels from explicit section headers ("Background:", "METHODS:", ...);
// a header labels its sentence and the following ones until the next header.
std::vector<LabeledSentence> header_labeled_sentences(const Corpus& corpus);

struct TrainPipelineOptions {
  std::optional<std::filesystem::path> aspect_labels;  // JSON lines
  std::size_t iterations = 15;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  double beta = 0.01;
  VocabularyConfig vocabulary;
  ProjectionConfig projection;
  bool parallel = true;
};

struct SlotReport {
  SlotId slot;
  std::size_t documents = 0;
  std::size_t requested_topics = 0;
  std::size_t trained_documents = 0;
  std::vector<std::string> excluded_doc_ids;
  std::size_t vocabulary_size = 0;
  std::string vocabulary_hash;
  bool projected = false;
  std::string file;  // bundle file name, empty when skipped
  std::string hash;
  std::string skipped_reason;
};

struct TrainReport {
  std::vector<SlotReport> slots;
  CorpusStats stats;
  std::size_t imported_labels = 0;
  std::string aspect_source;  // "labels" or "headers"
  std::string corpus_hash;
  std::string aspect_model_hash;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
};

inline constexpr const char* kCorpusFile = "corpus.asc";
inline constexpr const char* kAspectModelFile = "aspect.asc";
inline constexpr const char* kManifestFile = "manifest.json";
std::string slot_bundle_filename(SlotId slot);

// Writes corpus.asc (with imported labels), aspect.asc, one bundle per
// trainable slot and manifest.json. Slots with fewer than two documents or an
// empty vocabulary are skipped with a warning. Files are staged in a scratch
// directory and moved into place at the end; on failure the scratch directory
// is removed and existing outputs are left alone.
TrainReport train_pipeline(const std::filesystem::path& snapshot,
                           const std::filesystem::path& out_dir,
                           const TrainPipelineOptions& options = {});

// The manifest body.
std::string train_report_json(const TrainReport& report);

struct Manifest {
  std::string corpus_file;
  std::string aspect_model_file;
  std::map<SlotId, std::string> slot_files;
};
Manifest read_manifest(const std::filesystem::path& path);
std::string ingest_report_json(const IngestReport& report);
std::string corpus_stats_json(const CorpusStats& stats);

std::vector<std::string> build_gazetteer_file(const std::filesystem::path& dictionary,
                                              const std::filesystem::path& out);

}  // namespace aspectscope
