#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aspectscope/aspect.hpp"
#include "aspectscope/corpus.hpp"
#include "aspectscope/gazetteer.hpp"
#include "aspectscope/labels.hpp"
#include "aspectscope/lda.hpp"
#include "aspectscope/tsne.hpp"

// Artifact container:
//   8 bytes  magic "ASPSCOPE"
//   1 byte   format version
//   1 byte   kind
//   32 bytes SHA-256 of the payload
//   payload  CBOR document (see docs/artifact-format.md)
namespace aspectscope {

enum class ArtifactKind : std::uint8_t {
  kCorpus = 1,
  kAspectModel = 2,
  kLdaBundle = 3,
  kGazetteer = 4,
};

inline constexpr std::uint8_t kArtifactFormatVersion = 1;
inline constexpr std::size_t kArtifactHeaderSize = 8 + 1 + 1 + 32;

const char* artifact_kind_name(ArtifactKind kind);

struct SaveOptions {
  // Test hook: abort the write after this many bytes, as if the process died.
  std::optional<std::size_t> fail_after_bytes;
};

// Writes header + payload to a temp file in the same directory, then renames.
// Returns the hex payload hash.
std::string save_artifact(const std::filesystem::path& path, ArtifactKind kind,
                          const std::vector<std::uint8_t>& payload,
                          const SaveOptions& options = {});

struct ArtifactHeader {
  std::uint8_t version = 0;
  ArtifactKind kind = ArtifactKind::kCorpus;
  std::string hash;  // hex
};

// Verifies magic, version, kind and hash before returning the payload.
std::vector<std::uint8_t> load_artifact(const std::filesystem::path& path,
                                        ArtifactKind expected_kind,
                                        ArtifactHeader* header = nullptr);

std::string sha256_hex(const void* data, std::size_t size);

// Everything the service needs for one model slot.
struct LdaBundle {
  SlotId slot;
  std::size_t slot_documents = 0;   // papers in the slot before vocabulary exclusion
  std::size_t requested_topics = 0; // heuristic_topic_count(slot_documents)
  LdaModel model;
  std::optional<std::vector<ProjectedPoint>> projection;  // titles left empty
};

std::vector<std::uint8_t> encode_corpus(const Corpus& corpus);
Corpus decode_corpus(const std::vector<std::uint8_t>& payload);
std::vector<std::uint8_t> encode_aspect_model(const AspectModel& model);
AspectModel decode_aspect_model(const std::vector<std::uint8_t>& payload);
std::vector<std::uint8_t> encode_lda_bundle(const LdaBundle& bundle);
LdaBundle decode_lda_bundle(const std::vector<std::uint8_t>& payload);
std::vector<std::uint8_t> encode_gazetteer(const Gazetteer& gazetteer);
Gazetteer decode_gazetteer(const std::vector<std::uint8_t>& payload);

std::string save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                        const SaveOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path);
std::string save_aspect_model(const AspectModel& model, const std::filesystem::path& path);
AspectModel load_aspect_model(const std::filesystem::path& path);
std::string save_lda_bundle(const LdaBundle& bundle, const std::filesystem::path& path);
LdaBundle load_lda_bundle(const std::filesystem::path& path);
std::string save_gazetteer(const Gazetteer& gazetteer, const std::filesystem::path& path);
Gazetteer load_gazetteer(const std::filesystem::path& path);

}  // namespace aspectscope
