#include "aspectscope/store.hpp"

#include <fcntl.h>
#include <openssl/sha.h>
#include <unistd.h>

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "aspectscope/error.hpp"
#include "json.hpp"

namespace aspectscope {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'A', 'S', 'P', 'S', 'C', 'O', 'P', 'E'};

json doubles_to_binary(std::span<const double> values) {
  std::vector<std::uint8_t> bytes(values.size() * sizeof(double));
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return json::binary(std::move(bytes));
}

std::vector<double> binary_to_doubles(const json& value) {
  const auto& bytes = value.get_binary();
  if (bytes.size() % 8 != 0) throw Error(ErrorCode::kCorrupt, "corrupt artifact: bad array");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", doubles_to_binary(m.data())}};
}

Matrix matrix_from_json(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                binary_to_doubles(j.at("data")));
}

json date_to_json(const std::optional<Date>& date) {
  return date ? json(date->iso()) : json(nullptr);
}

std::optional<Date> date_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  auto date = Date::parse(j.get<std::string>());
  if (!date) throw Error(ErrorCode::kCorrupt, "corrupt artifact: bad date");
  return date;
}

std::vector<std::uint8_t> to_bytes(const json& payload) { return json::to_cbor(payload); }

template <typename Fn>
auto decode(const std::vector<std::uint8_t>& payload, Fn&& fn) {
  try {
    return fn(json::from_cbor(payload));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("corrupt artifact: ") + e.what());
  }
}

void write_all(int fd, const std::uint8_t* data, std::size_t size, const std::string& path) {
  while (size > 0) {
    const ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, "write failed for '" + path + "': " + std::strerror(errno));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

}  // namespace

const char* artifact_kind_name(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::kCorpus: return "corpus";
    case ArtifactKind::kAspectModel: return "aspect_model";
    case ArtifactKind::kLdaBundle: return "lda_bundle";
    case ArtifactKind::kGazetteer: return "gazetteer";
  }
  return "unknown";
}

std::string sha256_hex(const void* data, std::size_t size) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(static_cast<const unsigned char*>(data), size, digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

std::string save_artifact(const std::filesystem::path& path, ArtifactKind kind,
                          const std::vector<std::uint8_t>& payload, const SaveOptions& options) {
  std::vector<std::uint8_t> bytes(kMagic, kMagic + 8);
  bytes.push_back(kArtifactFormatVersion);
  bytes.push_back(static_cast<std::uint8_t>(kind));
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(payload.data(), payload.size(), digest);
  bytes.insert(bytes.end(), digest, digest + SHA256_DIGEST_LENGTH);
  bytes.insert(bytes.end(), payload.begin(), payload.end());

  static std::atomic<unsigned> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  const std::string tmp_name = tmp.string();
  const int fd = ::open(tmp_name.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    throw Error(ErrorCode::kIo,
                "cannot write '" + path.string() + "': " + std::strerror(errno));
  }
  try {
    if (options.fail_after_bytes && *options.fail_after_bytes < bytes.size()) {
      write_all(fd, bytes.data(), *options.fail_after_bytes, tmp_name);
      throw Error(ErrorCode::kIo, "simulated failure while writing '" + path.string() + "'");
    }
    write_all(fd, bytes.data(), bytes.size(), tmp_name);
    if (::fsync(fd) != 0) {
      throw Error(ErrorCode::kIo, "fsync failed for '" + tmp_name + "'");
    }
  } catch (...) {
    ::close(fd);
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot replace '" + path.string() + "'");
  }
  return sha256_hex(payload.data(), payload.size());
}

std::vector<std::uint8_t> load_artifact(const std::filesystem::path& path,
                                        ArtifactKind expected_kind, ArtifactHeader* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  const std::string name = path.string();
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 8);
  if (magic_len == 0 || std::memcmp(bytes.data(), kMagic, magic_len) != 0) {
    throw Error(ErrorCode::kNotArtifact, "not an artifact file: '" + name + "'");
  }
  if (bytes.size() < kArtifactHeaderSize) {
    throw Error(ErrorCode::kCorrupt, "corrupt artifact: '" + name + "' is truncated");
  }
  const std::uint8_t version = bytes[8];
  if (version > kArtifactFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported version " + std::to_string(version) + " in '" + name + "'");
  }
  if (version == 0) throw Error(ErrorCode::kCorrupt, "corrupt artifact: '" + name + "'");
  std::vector<std::uint8_t> payload(bytes.begin() + kArtifactHeaderSize, bytes.end());
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(payload.data(), payload.size(), digest);
  if (std::memcmp(digest, bytes.data() + 10, SHA256_DIGEST_LENGTH) != 0) {
    throw Error(ErrorCode::kCorrupt, "corrupt artifact: hash mismatch in '" + name + "'");
  }
  const auto kind = static_cast<ArtifactKind>(bytes[9]);
  if (kind != expected_kind) {
    throw Error(ErrorCode::kKindMismatch, std::string("kind mismatch: expected ") +
                                              artifact_kind_name(expected_kind) + ", found " +
                                              artifact_kind_name(kind) + " in '" + name + "'");
  }
  if (header) {
    header->version = version;
    header->kind = kind;
    header->hash = sha256_hex(payload.data(), payload.size());
  }
  return payload;
}

// Corpus

std::vector<std::uint8_t> encode_corpus(const Corpus& corpus) {
  json papers = json::array();
  for (const auto& p : corpus.papers()) {
    papers.push_back({{"id", p.paper_id},
                      {"title", p.title},
                      {"abstract", p.abstract},
                      {"date", date_to_json(p.publish_time)},
                      {"covid", p.is_covid}});
  }
  json overrides = json::object();
  for (const auto& [id, labels] : corpus.label_overrides()) {
    json entries = json::array();
    for (const auto& [index, label] : labels) {
      entries.push_back({index, std::string(aspect_label_name(label))});
    }
    overrides[id] = std::move(entries);
  }
  return to_bytes({{"papers", std::move(papers)}, {"label_overrides", std::move(overrides)}});
}

Corpus decode_corpus(const std::vector<std::uint8_t>& payload) {
  return decode(payload, [](const json& j) {
    std::vector<PaperRecord> papers;
    for (const auto& p : j.at("papers")) {
      PaperRecord r;
      r.paper_id = p.at("id").get<std::string>();
      r.title = p.at("title").get<std::string>();
      r.abstract = p.at("abstract").get<std::string>();
      r.publish_time = date_from_json(p.at("date"));
      r.is_covid = p.at("covid").get<bool>();
      papers.push_back(std::move(r));
    }
    Corpus corpus(std::move(papers));
    LabelOverrides overrides;
    for (const auto& [id, entries] : j.at("label_overrides").items()) {
      auto& labels = overrides[id];
      for (const auto& e : entries) {
        const auto label = parse_aspect_label(e.at(1).get<std::string>());
        if (!label) throw Error(ErrorCode::kCorrupt, "corrupt artifact: bad label");
        labels[e.at(0).get<std::size_t>()] = *label;
      }
    }
    corpus.set_label_overrides(std::move(overrides));
    return corpus;
  });
}

// Aspect model

std::vector<std::uint8_t> encode_aspect_model(const AspectModel& model) {
  std::vector<std::string> tokens;
  tokens.reserve(model.token_weights().size());
  for (const auto& [token, w] : model.token_weights()) tokens.push_back(token);
  std::sort(tokens.begin(), tokens.end());
  std::vector<double> weights;
  weights.reserve(tokens.size() * kNumAspectLabels);
  for (const auto& token : tokens) {
    const auto& w = model.token_weights().at(token);
    weights.insert(weights.end(), w.begin(), w.end());
  }
  std::vector<double> position;
  for (const auto& row : model.position_weights()) position.insert(position.end(), row.begin(), row.end());
  const auto& meta = model.metadata();
  return to_bytes({{"active", model.active()},
                   {"tokens", tokens},
                   {"token_weights", doubles_to_binary(weights)},
                   {"unknown", doubles_to_binary(model.unknown_weight())},
                   {"position", doubles_to_binary(position)},
                   {"meta",
                    {{"corpus_id", meta.corpus_id},
                     {"seed", meta.seed},
                     {"date", meta.date},
                     {"training_examples", meta.training_examples}}}});
}

AspectModel decode_aspect_model(const std::vector<std::uint8_t>& payload) {
  return decode(payload, [](const json& j) {
    const auto active = j.at("active").get<std::array<bool, kNumAspectLabels>>();
    const auto tokens = j.at("tokens").get<std::vector<std::string>>();
    const auto weights = binary_to_doubles(j.at("token_weights"));
    const auto unknown = binary_to_doubles(j.at("unknown"));
    const auto position = binary_to_doubles(j.at("position"));
    if (weights.size() != tokens.size() * kNumAspectLabels || unknown.size() != kNumAspectLabels ||
        position.size() != kPositionBins * kNumAspectLabels) {
      throw Error(ErrorCode::kCorrupt, "corrupt artifact: aspect model shape");
    }
    std::unordered_map<std::string, AspectModel::LogWeights> token_weights;
    token_weights.reserve(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      AspectModel::LogWeights w{};
      std::copy_n(weights.begin() + static_cast<std::ptrdiff_t>(t * kNumAspectLabels),
                  kNumAspectLabels, w.begin());
      token_weights.emplace(tokens[t], w);
    }
    AspectModel::LogWeights unknown_w{};
    std::copy_n(unknown.begin(), kNumAspectLabels, unknown_w.begin());
    std::array<AspectModel::LogWeights, kPositionBins> pos{};
    for (std::size_t b = 0; b < kPositionBins; ++b) {
      std::copy_n(position.begin() + static_cast<std::ptrdiff_t>(b * kNumAspectLabels),
                  kNumAspectLabels, pos[b].begin());
    }
    const auto& m = j.at("meta");
    AspectModel::Metadata meta;
    meta.corpus_id = m.at("corpus_id").get<std::string>();
    meta.seed = m.at("seed").get<std::uint64_t>();
    meta.date = m.at("date").get<std::string>();
    meta.training_examples = m.at("training_examples").get<std::size_t>();
    return AspectModel(active, std::move(token_weights), unknown_w, pos, std::move(meta));
  });
}

// LDA bundle

std::vector<std::uint8_t> encode_lda_bundle(const LdaBundle& bundle) {
  const LdaModel& m = bundle.model;
  json projection = nullptr;
  if (bundle.projection) {
    std::vector<std::string> ids;
    std::vector<double> xy;
    std::vector<std::size_t> topics;
    for (const auto& p : *bundle.projection) {
      ids.push_back(p.paper_id);
      xy.push_back(p.x);
      xy.push_back(p.y);
      topics.push_back(p.dominant_topic);
    }
    projection = {{"ids", ids}, {"xy", doubles_to_binary(xy)}, {"topics", topics}};
  }
  return to_bytes({{"slot", bundle.slot.name()},
                   {"slot_documents", bundle.slot_documents},
                   {"requested_topics", bundle.requested_topics},
                   {"config",
                    {{"num_topics", m.config.num_topics},
                     {"iterations", m.config.iterations},
                     {"alpha", doubles_to_binary(std::span<const double>(&m.config.alpha, 1))},
                     {"beta", doubles_to_binary(std::span<const double>(&m.config.beta, 1))},
                     {"seed", m.config.seed}}},
                   {"vocabulary",
                    {{"words", m.vocabulary.words()},
                     {"df", m.vocabulary.document_frequency()},
                     {"num_documents", m.vocabulary.num_documents()}}},
                   {"doc_ids", m.doc_ids},
                   {"excluded_doc_ids", m.excluded_doc_ids},
                   {"phi", matrix_to_json(m.phi)},
                   {"theta", matrix_to_json(m.theta)},
                   {"projection", std::move(projection)}});
}

LdaBundle decode_lda_bundle(const std::vector<std::uint8_t>& payload) {
  return decode(payload, [](const json& j) {
    LdaBundle bundle;
    const auto slot = SlotId::parse(j.at("slot").get<std::string>());
    if (!slot) throw Error(ErrorCode::kCorrupt, "corrupt artifact: bad slot");
    bundle.slot = *slot;
    bundle.slot_documents = j.at("slot_documents").get<std::size_t>();
    bundle.requested_topics = j.at("requested_topics").get<std::size_t>();
    LdaModel& m = bundle.model;
    const auto& c = j.at("config");
    m.config.num_topics = c.at("num_topics").get<std::size_t>();
    m.config.iterations = c.at("iterations").get<std::size_t>();
    m.config.alpha = binary_to_doubles(c.at("alpha")).at(0);
    m.config.beta = binary_to_doubles(c.at("beta")).at(0);
    m.config.seed = c.at("seed").get<std::uint64_t>();
    const auto& v = j.at("vocabulary");
    m.vocabulary = Vocabulary(v.at("words").get<std::vector<std::string>>(),
                              v.at("df").get<std::vector<std::uint32_t>>(),
                              v.at("num_documents").get<std::size_t>());
    m.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
    m.excluded_doc_ids = j.at("excluded_doc_ids").get<std::vector<std::string>>();
    m.phi = matrix_from_json(j.at("phi"));
    m.theta = matrix_from_json(j.at("theta"));
    if (m.phi.rows() != m.config.num_topics || m.phi.cols() != m.vocabulary.size() ||
        m.theta.rows() != m.doc_ids.size() || m.theta.cols() != m.config.num_topics) {
      throw Error(ErrorCode::kCorrupt, "corrupt artifact: model shape");
    }
    const auto& p = j.at("projection");
    if (!p.is_null()) {
      const auto ids = p.at("ids").get<std::vector<std::string>>();
      const auto xy = binary_to_doubles(p.at("xy"));
      const auto topics = p.at("topics").get<std::vector<std::size_t>>();
      if (xy.size() != 2 * ids.size() || topics.size() != ids.size()) {
        throw Error(ErrorCode::kCorrupt, "corrupt artifact: projection shape");
      }
      std::vector<ProjectedPoint> points(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) {
        points[i] = {ids[i], xy[2 * i], xy[2 * i + 1], topics[i], {}};
      }
      bundle.projection = std::move(points);
    }
    return bundle;
  });
}

// Gazetteer

std::vector<std::uint8_t> encode_gazetteer(const Gazetteer& gazetteer) {
  json concepts = json::array();
  for (const auto& c : gazetteer.concepts()) {
    concepts.push_back({{"cui", c.cui},
                        {"name", c.canonical_name},
                        {"synonyms", c.synonyms},
                        {"semantic_type", c.semantic_type},
                        {"definition", c.definition}});
  }
  return to_bytes({{"concepts", std::move(concepts)}});
}

Gazetteer decode_gazetteer(const std::vector<std::uint8_t>& payload) {
  return decode(payload, [](const json& j) {
    std::vector<Concept> concepts;
    for (const auto& c : j.at("concepts")) {
      concepts.push_back({c.at("cui").get<std::string>(), c.at("name").get<std::string>(),
                          c.at("synonyms").get<std::vector<std::string>>(),
                          c.at("semantic_type").get<std::string>(),
                          c.at("definition").get<std::string>()});
    }
    return Gazetteer::build(std::move(concepts));
  });
}

std::string save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                        const SaveOptions& options) {
  return save_artifact(path, ArtifactKind::kCorpus, encode_corpus(corpus), options);
}
Corpus load_corpus(const std::filesystem::path& path) {
  return decode_corpus(load_artifact(path, ArtifactKind::kCorpus));
}
std::string save_aspect_model(const AspectModel& model, const std::filesystem::path& path) {
  return save_artifact(path, ArtifactKind::kAspectModel, encode_aspect_model(model));
}
AspectModel load_aspect_model(const std::filesystem::path& path) {
  return decode_aspect_model(load_artifact(path, ArtifactKind::kAspectModel));
}
std::string save_lda_bundle(const LdaBundle& bundle, const std::filesystem::path& path) {
  return save_artifact(path, ArtifactKind::kLdaBundle, encode_lda_bundle(bundle));
}
LdaBundle load_lda_bundle(const std::filesystem::path& path) {
  return decode_lda_bundle(load_artifact(path, ArtifactKind::kLdaBundle));
}
std::string save_gazetteer(const Gazetteer& gazetteer, const std::filesystem::path& path) {
  return save_artifact(path, ArtifactKind::kGazetteer, encode_gazetteer(gazetteer));
}
Gazetteer load_gazetteer(const std::filesystem::path& path) {
  return decode_gazetteer(load_artifact(path, ArtifactKind::kGazetteer));
}

}  // namespace aspectscope
