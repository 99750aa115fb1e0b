#include "aspectscope/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <atomic>
#include <fstream>
#include <future>
#include <set>
#include <unistd.h>

#include "aspectscope/error.hpp"
#include "aspectscope/gazetteer.hpp"
#include "json.hpp"

namespace aspectscope {

using nlohmann::json;

namespace fs = std::filesystem;

IngestReport ingest_file(const fs::path& metadata_csv, const fs::path& snapshot_out,
                         const IngestOptions& options) {
  std::ifstream in(metadata_csv, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + metadata_csv.string() + "'");
  IngestResult result = ingest(in, options);
  save_corpus(result.corpus, snapshot_out);
  return result.report;
}

AnnotatedCorpus annotate(const Corpus& corpus, const AspectModel& model) {
  AnnotatedCorpus out;
  out.sentences.resize(corpus.size());
  out.labels.resize(corpus.size());
  const auto& overrides = corpus.label_overrides();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const PaperRecord& paper = corpus.papers()[i];
    auto& sentences = out.sentences[i];
    sentences = segment_sentences(paper.abstract);
    const auto it = overrides.find(paper.paper_id);
    auto& labels = out.labels[i];
    labels.reserve(sentences.size());
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (it != overrides.end()) {
        const auto o = it->second.find(s);
        if (o != it->second.end()) {
          labels.push_back(o->second);
          continue;
        }
      }
      const double position = static_cast<double>(s) / static_cast<double>(sentences.size());
      labels.push_back(model.classify(tokenize(sentences[s].text), position).label);
    }
  }
  return out;
}

std::vector<TokenizedDoc> slot_documents(const Corpus& corpus, const AnnotatedCorpus& annotated,
                                         SlotId slot) {
  std::vector<TokenizedDoc> docs;
  const auto label = scope_label(slot.scope);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const PaperRecord& paper = corpus.papers()[i];
    if (slot.covid_only && !paper.is_covid) continue;
    TokenizedDoc doc{paper.paper_id, {}};
    if (!label) {
      doc.tokens = tokenize(paper.abstract);
    } else {
      bool any = false;
      for (std::size_t s = 0; s < annotated.sentences[i].size(); ++s) {
        if (annotated.labels[i][s] != *label) continue;
        any = true;
        auto tokens = tokenize(annotated.sentences[i][s].text);
        doc.tokens.insert(doc.tokens.end(), std::make_move_iterator(tokens.begin()),
                          std::make_move_iterator(tokens.end()));
      }
      if (!any) continue;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

namespace {

std::optional<AspectLabel> header_label(std::string_view sentence) {
  const auto colon = sentence.find(':');
  if (colon == std::string_view::npos || colon > 40) return std::nullopt;
  std::string head;
  for (char c : trim(sentence.substr(0, colon))) {
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == ' ' || c == '/' || c == '&')) {
      return std::nullopt;
    }
    head.push_back(c);
  }
  head = to_lower_ascii(head);
  static const std::map<std::string, AspectLabel, std::less<>> kHeaders = {
      {"background", AspectLabel::kBackground},
      {"introduction", AspectLabel::kBackground},
      {"context", AspectLabel::kBackground},
      {"objective", AspectLabel::kPurpose},
      {"objectives", AspectLabel::kPurpose},
      {"purpose", AspectLabel::kPurpose},
      {"aim", AspectLabel::kPurpose},
      {"aims", AspectLabel::kPurpose},
      {"method", AspectLabel::kMethod},
      {"methods", AspectLabel::kMethod},
      {"methodology", AspectLabel::kMethod},
      {"design", AspectLabel::kMethod},
      {"materials and methods", AspectLabel::kMethod},
      {"methods and materials", AspectLabel::kMethod},
      {"result", AspectLabel::kFinding},
      {"results", AspectLabel::kFinding},
      {"finding", AspectLabel::kFinding},
      {"findings", AspectLabel::kFinding},
      {"conclusion", AspectLabel::kFinding},
      {"conclusions", AspectLabel::kFinding},
      {"interpretation", AspectLabel::kFinding},
  };
  const auto it = kHeaders.find(head);
  if (it == kHeaders.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::vector<LabeledSentence> header_labeled_sentences(const Corpus& corpus) {
  std::vector<LabeledSentence> out;
  for (const auto& paper : corpus.papers()) {
    const auto sentences = segment_sentences(paper.abstract);
    std::optional<AspectLabel> current;
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      if (auto h = header_label(sentences[s].text)) current = h;
      if (!current) continue;
      out.push_back({tokenize(sentences[s].text),
                     static_cast<double>(s) / static_cast<double>(sentences.size()), *current});
    }
  }
  return out;
}

std::string slot_bundle_filename(SlotId slot) { return "lda-" + slot.name() + ".asc"; }

namespace {

struct SlotJob {
  SlotReport report;
  std::optional<LdaBundle> bundle;
  std::vector<std::string> warnings;
};

SlotJob train_slot(const Corpus& corpus, const AnnotatedCorpus& annotated, SlotId slot,
                   const TrainPipelineOptions& options) {
  SlotJob job;
  job.report.slot = slot;
  const auto docs = slot_documents(corpus, annotated, slot);
  job.report.documents = docs.size();
  if (docs.size() < 2) {
    job.report.skipped_reason = "fewer than 2 documents";
    job.warnings.push_back("slot " + slot.name() + " skipped: " +
                           std::to_string(docs.size()) + " document(s)");
    return job;
  }
  job.report.requested_topics = heuristic_topic_count(docs.size());
  Vocabulary vocabulary;
  try {
    vocabulary = build_vocabulary(docs, options.vocabulary);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTraining) throw;
    job.report.skipped_reason = e.what();
    job.warnings.push_back("slot " + slot.name() + " skipped: " + e.what());
    return job;
  }
  LdaConfig config;
  config.num_topics = job.report.requested_topics;
  config.iterations = options.iterations;
  config.alpha = options.alpha;
  config.beta = options.beta;
  config.seed = options.seed;

  LdaBundle bundle;
  bundle.slot = slot;
  bundle.slot_documents = docs.size();
  bundle.requested_topics = config.num_topics;
  bundle.model = train_lda(docs, vocabulary, config);
  const LdaModel& model = bundle.model;
  if (model.num_docs() >= 5) {
    ProjectionConfig pc = options.projection;
    pc.seed = options.seed;
    bundle.projection = project(model.doc_ids, model.theta, pc).points;
  } else {
    job.warnings.push_back("slot " + slot.name() + ": too few documents to project");
  }
  job.report.trained_documents = model.num_docs();
  job.report.excluded_doc_ids = model.excluded_doc_ids;
  job.report.vocabulary_size = model.vocabulary.size();
  job.report.vocabulary_hash = model.vocabulary.hash();
  job.report.projected = bundle.projection.has_value();
  job.report.file = slot_bundle_filename(slot);
  job.bundle = std::move(bundle);
  return job;
}

// Scratch directory inside out_dir, removed unless released.
class Staging {
 public:
  explicit Staging(const fs::path& out_dir) {
    static std::atomic<unsigned> counter{0};
    path_ = out_dir / (".staging-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string newest_date(const Corpus& corpus) {
  std::optional<Date> newest;
  for (const auto& p : corpus.papers()) {
    if (p.publish_time && (!newest || *p.publish_time > *newest)) newest = p.publish_time;
  }
  return newest ? newest->iso() : std::string();
}

json stats_to_json(const CorpusStats& stats) {
  json all = json::object();
  json covid = json::object();
  for (Scope s : kAllScopes) {
    all[std::string(scope_name(s))] = stats.all[static_cast<std::size_t>(s)];
    covid[std::string(scope_name(s))] = stats.covid[static_cast<std::size_t>(s)];
  }
  return {{"total", stats.total}, {"all", all}, {"covid", covid}};
}

}  // namespace

TrainReport train_pipeline(const fs::path& snapshot, const fs::path& out_dir,
                           const TrainPipelineOptions& options) {
  TrainReport report;
  report.seed = options.seed;
  report.iterations = options.iterations;
  LdaConfig{1, options.iterations, options.alpha, options.beta, options.seed}.validate();
  options.vocabulary.validate();
  options.projection.validate();

  ArtifactHeader snapshot_header;
  Corpus corpus = decode_corpus(load_artifact(snapshot, ArtifactKind::kCorpus, &snapshot_header));

  AspectTrainOptions aspect_options;
  aspect_options.seed = options.seed;
  aspect_options.corpus_id = snapshot_header.hash;
  aspect_options.date = newest_date(corpus);
  AspectModel aspect_model;
  if (options.aspect_labels) {
    std::ifstream in(*options.aspect_labels, std::ios::binary);
    if (!in) {
      throw Error(ErrorCode::kIo, "cannot open '" + options.aspect_labels->string() + "'");
    }
    const auto records = read_labeled_jsonl(in);
    aspect_model = train_aspect(to_training_examples(records), aspect_options);
    LabelOverrides overrides;
    for (const auto& r : records) {
      if (!corpus.find(r.paper_id)) continue;
      overrides[r.paper_id][r.sentence_index] = r.label;
      ++report.imported_labels;
    }
    corpus.set_label_overrides(std::move(overrides));
    report.aspect_source = "labels";
  } else {
    const auto examples = header_labeled_sentences(corpus);
    if (examples.empty()) {
      throw Error(ErrorCode::kTraining,
                  "no aspect training data: pass labeled sentences or use abstracts with "
                  "section headers");
    }
    std::set<AspectLabel> seen;
    for (const auto& e : examples) seen.insert(e.label);
    aspect_options.labels.assign(seen.begin(), seen.end());
    aspect_model = train_aspect(examples, aspect_options);
    report.aspect_source = "headers";
    if (seen.size() < kNumAspectLabels) {
      std::string missing;
      for (AspectLabel l : kAllAspectLabels) {
        if (seen.count(l)) continue;
        if (!missing.empty()) missing += ", ";
        missing += aspect_label_name(l);
      }
      report.warnings.push_back("section headers give no examples for: " + missing);
    }
  }

  const AnnotatedCorpus annotated = annotate(corpus, aspect_model);
  report.stats = corpus_stats(corpus, annotated.labels);

  const auto slots = all_slots();
  std::vector<SlotJob> jobs;
  if (options.parallel) {
    std::vector<std::future<SlotJob>> futures;
    for (SlotId slot : slots) {
      futures.push_back(std::async(std::launch::async, [&, slot] {
        return train_slot(corpus, annotated, slot, options);
      }));
    }
    // Wait for every job before rethrowing so no thread outlives the inputs.
    std::exception_ptr failure;
    for (auto& f : futures) {
      try {
        jobs.push_back(f.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (SlotId slot : slots) jobs.push_back(train_slot(corpus, annotated, slot, options));
  }

  fs::create_directories(out_dir);
  Staging staging(out_dir);
  report.corpus_hash = save_corpus(corpus, staging.path() / kCorpusFile);
  report.aspect_model_hash = save_aspect_model(aspect_model, staging.path() / kAspectModelFile);
  for (auto& job : jobs) {
    if (job.bundle) {
      job.report.hash = save_lda_bundle(*job.bundle, staging.path() / job.report.file);
    }
    report.warnings.insert(report.warnings.end(), job.warnings.begin(), job.warnings.end());
    report.slots.push_back(std::move(job.report));
  }
  {
    std::ofstream manifest(staging.path() / kManifestFile, std::ios::binary);
    manifest << train_report_json(report) << '\n';
    if (!manifest) throw Error(ErrorCode::kIo, "cannot write manifest");
  }

  std::vector<std::string> names = {kCorpusFile, kAspectModelFile};
  for (const auto& s : report.slots) {
    if (!s.file.empty()) names.push_back(s.file);
  }
  names.push_back(kManifestFile);
  for (const auto& name : names) fs::rename(staging.path() / name, out_dir / name);
  return report;
}

std::string train_report_json(const TrainReport& report) {
  json slots = json::array();
  for (const auto& s : report.slots) {
    json j = {{"slot", s.slot.name()}, {"documents", s.documents}};
    if (!s.skipped_reason.empty()) {
      j["skipped"] = s.skipped_reason;
    } else {
      j["requested_topics"] = s.requested_topics;
      j["trained_documents"] = s.trained_documents;
      j["excluded_doc_ids"] = s.excluded_doc_ids;
      j["vocabulary_size"] = s.vocabulary_size;
      j["vocabulary_hash"] = s.vocabulary_hash;
      j["projected"] = s.projected;
      j["file"] = s.file;
      j["hash"] = s.hash;
    }
    slots.push_back(std::move(j));
  }
  json out = {{"format_version", kArtifactFormatVersion},
              {"seed", report.seed},
              {"iterations", report.iterations},
              {"aspect_source", report.aspect_source},
              {"imported_labels", report.imported_labels},
              {"corpus", {{"file", kCorpusFile}, {"hash", report.corpus_hash}}},
              {"aspect_model", {{"file", kAspectModelFile}, {"hash", report.aspect_model_hash}}},
              {"stats", stats_to_json(report.stats)},
              {"slots", std::move(slots)},
              {"warnings", report.warnings}};
  return out.dump(2);
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  try {
    const json j = json::parse(in);
    Manifest m;
    m.corpus_file = j.at("corpus").at("file").get<std::string>();
    m.aspect_model_file = j.at("aspect_model").at("file").get<std::string>();
    for (const auto& s : j.at("slots")) {
      if (!s.contains("file")) continue;
      const auto slot = SlotId::parse(s.at("slot").get<std::string>());
      if (!slot) throw Error(ErrorCode::kCorrupt, "manifest names an unknown slot");
      m.slot_files[*slot] = s.at("file").get<std::string>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, "bad manifest '" + path.string() + "': " + e.what());
  }
}

std::string ingest_report_json(const IngestReport& report) {
  const auto& m = report.metadata;
  return json{{"rows", m.rows},
              {"kept", report.kept},
              {"non_english_dropped", report.non_english_dropped},
              {"title_fallbacks", m.title_fallbacks},
              {"duplicates", m.duplicates},
              {"skipped_rows", m.skipped_rows},
              {"dropped_empty", m.dropped_empty},
              {"warnings", m.warnings}}
      .dump(2);
}

std::string corpus_stats_json(const CorpusStats& stats) { return stats_to_json(stats).dump(2); }

std::vector<std::string> build_gazetteer_file(const fs::path& dictionary, const fs::path& out) {
  std::vector<std::string> warnings;
  const Gazetteer gazetteer = Gazetteer::build(load_concepts(dictionary.string()), &warnings);
  save_gazetteer(gazetteer, out);
  return warnings;
}

}  // namespace aspectscope
