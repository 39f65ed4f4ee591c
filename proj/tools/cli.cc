#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kgqa/annotation.h"
#include "kgqa/crf_tagger.h"
#include "kgqa/dataset.h"
#include "kgqa/entity_linker.h"
#include "kgqa/error.h"
#include "kgqa/eval_harness.h"
#include "kgqa/kg_store.h"
#include "kgqa/ngram_index.h"
#include "kgqa/pipeline.h"
#include "kgqa/relation_clf.h"
#include "kgqa/synthetic.h"
#include "kgqa/text_io.h"

namespace kgqa::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kPathKeys = {"triples", "names", "wiki", "train", "valid",
                                         "test", "embeddings", "out"};

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"out", "kgqa_out"},
      {"eval_split", "test"},
      {"m", "50"},
      {"r", "5"},
      {"pool_cap", "500"},
      {"epsilon", "1e-9"},
      {"threads", "1"},
      {"crf.l2", "1e-4"},
      {"crf.step", "0.5"},
      {"crf.decay", "0.1"},
      {"crf.epochs", "10"},
      {"crf.batch", "16"},
      {"crf.seed", "1"},
      {"crf.min_count", "1"},
      {"lr.featurizer", "tfidf"},
      {"lr.l2", "1e-6"},
      {"lr.step", "1.0"},
      {"lr.decay", "0.1"},
      {"lr.epochs", "15"},
      {"lr.batch", "32"},
      {"lr.seed", "1"},
      {"lr.min_df", "1"},
  };
  return d;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::set<std::string> k(kPathKeys.begin(), kPathKeys.end());
    for (const auto& [key, value] : defaults()) k.insert(key);
    return std::vector<std::string>(k.begin(), k.end());
  }();
  return keys;
}

Config::Config() : values_(defaults()) {}

void Config::put(const std::string& key, std::string value) {
  const auto& keys = known_keys();
  if (!std::binary_search(keys.begin(), keys.end(), key)) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  values_[key] = std::move(value);
}

void Config::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  put(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

void Config::load_file(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  std::size_t lineno = 0;
  for (std::string_view raw : io::split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (kPathKeys.count(key) && !value.empty() && fs::path(value).is_relative()) {
      value = (base / value).lexically_normal().string();
    }
    try {
      put(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

bool Config::has(const std::string& key) const {
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Config::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) {
    throw ConfigError("missing config field '" + key + "'");
  }
  return it->second;
}

std::string Config::get(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? std::string() : it->second;
}

double Config::get_double(const std::string& key) const {
  try {
    return io::parse_double(require(key));
  } catch (const Error&) {
    throw ConfigError("config field '" + key + "' is not a number: '" + get(key) + "'");
  }
}

std::size_t Config::get_size(const std::string& key) const {
  long long v = 0;
  try {
    v = io::parse_int(require(key));
  } catch (const Error&) {
    throw ConfigError("config field '" + key + "' is not an integer: '" + get(key) + "'");
  }
  if (v < 0) throw ConfigError("config field '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t Config::get_u64(const std::string& key) const { return get_size(key); }

namespace {

// Shared state for one invocation.
class Workspace {
 public:
  Workspace(const Config& cfg, std::ostream& out, std::ostream& err)
      : cfg_(cfg), out_(out), err_(err), dir_(cfg.require("out")) {}

  const Config& cfg() const { return cfg_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  fs::path path(const std::string& rel) const { return dir_ / rel; }

  fs::path artifact(const std::string& rel, const std::string& producer) const {
    fs::path p = path(rel);
    if (!fs::exists(p)) {
      throw DependencyError("missing artifact " + p.string() + "; run '" + producer + "' first");
    }
    return p;
  }

  fs::path input(const std::string& key) const {
    fs::path p = cfg_.require(key);
    if (!fs::exists(p)) throw ConfigError("config field '" + key + "' points to missing file " + p.string());
    return p;
  }

  const KnowledgeGraph& kg() {
    if (!kg_) {
      artifact("kg/triples.tsv", "build-kg");
      kg_ = std::make_unique<KnowledgeGraph>(KnowledgeGraph::load_files(
          path("kg/triples.tsv"), path("kg/names.tsv"), path("kg/wiki.txt")));
    }
    return *kg_;
  }

  const InvertedIndex& index() {
    if (!index_) {
      fs::path p = artifact("index.snap", "build-index");
      index_ = std::make_unique<InvertedIndex>(InvertedIndex::load(p, kg()));
    }
    return *index_;
  }

  const CrfModel& crf() {
    if (!crf_) crf_ = std::make_unique<CrfModel>(CrfModel::load(artifact("crf.model", "train-ed")));
    return *crf_;
  }

  const LrModel& lr() {
    if (!lr_) {
      fs::path p = artifact("lr.model", "train-rp");
      lr_ = std::make_unique<LrModel>(LrModel::load(p, [](const std::string& emb) {
        return std::make_shared<const EmbeddingTable>(EmbeddingTable::load(emb));
      }));
    }
    return *lr_;
  }

  std::string eval_split() const {
    std::string s = cfg_.require("eval_split");
    if (s != "train" && s != "valid" && s != "test") {
      throw ConfigError("eval_split must be train, valid or test, got '" + s + "'");
    }
    return s;
  }

  const std::vector<QaExample>& split(const std::string& name) {
    auto it = splits_.find(name);
    if (it == splits_.end()) it = splits_.emplace(name, load_split(input(name))).first;
    return it->second;
  }

  PipelineOptions pipeline_options() const {
    PipelineOptions o;
    o.integrator.m = cfg_.get_size("m");
    o.integrator.r = cfg_.get_size("r");
    o.integrator.epsilon = cfg_.get_double("epsilon");
    o.linker.pool_cap = cfg_.get_size("pool_cap");
    o.threads = std::max<std::size_t>(1, cfg_.get_size("threads"));
    if (o.integrator.m == 0 || o.integrator.r == 0) throw ConfigError("m and r must be at least 1");
    return o;
  }

  void write(const std::string& rel, std::string_view contents) const {
    io::write_file_atomic(path(rel), contents);
  }

 private:
  const Config& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  fs::path dir_;
  std::unique_ptr<KnowledgeGraph> kg_;
  std::unique_ptr<InvertedIndex> index_;
  std::unique_ptr<CrfModel> crf_;
  std::unique_ptr<LrModel> lr_;
  std::map<std::string, std::vector<QaExample>> splits_;
};

CrfTrainConfig crf_config(const Config& c) {
  CrfTrainConfig t;
  t.l2 = c.get_double("crf.l2");
  t.step = c.get_double("crf.step");
  t.decay = c.get_double("crf.decay");
  t.epochs = static_cast<int>(c.get_size("crf.epochs"));
  t.batch_size = std::max<std::size_t>(1, c.get_size("crf.batch"));
  t.seed = c.get_u64("crf.seed");
  t.min_feature_count = c.get_size("crf.min_count");
  return t;
}

LrTrainConfig lr_config(const Config& c) {
  LrTrainConfig t;
  t.l2 = c.get_double("lr.l2");
  t.step = c.get_double("lr.step");
  t.decay = c.get_double("lr.decay");
  t.epochs = static_cast<int>(c.get_size("lr.epochs"));
  t.batch_size = std::max<std::size_t>(1, c.get_size("lr.batch"));
  t.seed = c.get_u64("lr.seed");
  return t;
}

std::vector<CrfExample> crf_examples(const std::vector<LabeledQuestion>& labeled) {
  std::vector<CrfExample> out;
  for (const LabeledQuestion& q : labeled) {
    if (q.kind != ProjectionKind::Failed && !q.question.empty()) {
      out.push_back(CrfExample{q.question.tokens, q.tags});
    }
  }
  return out;
}

std::vector<LrExample> lr_examples(const std::vector<QaExample>& split) {
  std::vector<LrExample> out;
  out.reserve(split.size());
  for (const QaExample& ex : split) out.push_back(LrExample{ex.question, ex.relation});
  return out;
}

// Builds an untrained LR model of the configured kind. Embed models get a
// vocabulary-filtered copy of the embeddings written next to the model so
// later loads stay cheap.
LrModel make_lr(Workspace& ws, const std::vector<LrExample>& examples) {
  const Config& c = ws.cfg();
  std::vector<std::string> classes = collect_classes(examples);
  FeaturizerKind kind = parse_featurizer(c.require("lr.featurizer"));
  if (kind == FeaturizerKind::Tfidf) {
    std::vector<TokenSeq> qs;
    qs.reserve(examples.size());
    for (const LrExample& ex : examples) qs.push_back(ex.question);
    return LrModel::make_tfidf(std::move(classes), TfidfFeaturizer::fit(qs, std::max<std::size_t>(1, c.get_size("lr.min_df"))));
  }

  std::unordered_set<std::string> keep;
  for (const char* name : {"train", "valid", "test"}) {
    if (!c.has(name) || !fs::exists(c.get(name))) continue;
    for (const QaExample& ex : ws.split(name)) keep.insert(ex.question.tokens.begin(), ex.question.tokens.end());
  }
  EmbeddingTable full = EmbeddingTable::load(ws.input("embeddings"), &keep);
  std::vector<std::string> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  std::string text;
  auto table = std::make_shared<EmbeddingTable>();
  for (const std::string& tok : sorted) {
    const float* v = full.find(tok);
    if (!v) continue;
    text += tok;
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
      text += ' ';
      text += io::format_double(v[d]);
    }
    text += '\n';
    table->add(tok, std::span<const float>(v, kEmbeddingDim));
  }
  fs::path sub = fs::absolute(ws.path("embeddings.sub.txt"));
  ws.write("embeddings.sub.txt", text);

  std::vector<std::string> rels;
  for (const LrExample& ex : examples) rels.push_back(ex.relation);
  return LrModel::make_embed(std::move(classes), fit_relation_terms(rels), table, sub.string());
}

std::string percent(double v) { return format_score(100.0 * v); }

// ---------------------------------------------------------------------------

int cmd_build_kg(Workspace& ws) {
  fs::path names = ws.cfg().has("names") ? ws.input("names") : fs::path();
  fs::path wiki = ws.cfg().has("wiki") ? ws.input("wiki") : fs::path();
  KnowledgeGraph kg = KnowledgeGraph::load_files(ws.input("triples"), names, wiki);
  fs::create_directories(ws.path("kg"));
  kg.save(ws.path("kg/triples.tsv"), ws.path("kg/names.tsv"), ws.path("kg/wiki.txt"));
  const LoadStats& s = kg.stats();
  ws.out() << "build-kg: " << kg.entity_count() << " entities, " << kg.relation_count()
           << " relations, " << kg.triple_count() << " triples (" << s.duplicate_triples
           << " duplicates, " << s.unknown_name_mids << " names and " << s.unknown_wiki_mids
           << " wiki ids without triples) -> " << ws.path("kg").string() << '\n';
  return 0;
}

int cmd_build_index(Workspace& ws) {
  InvertedIndex idx = InvertedIndex::build(ws.kg());
  idx.save(ws.path("index.snap"), ws.kg());
  ws.out() << "build-index: " << idx.gram_count() << " grams over " << idx.entry_count()
           << " entries -> " << ws.path("index.snap").string() << '\n';
  return 0;
}

int cmd_project(Workspace& ws) {
  const KnowledgeGraph& kg = ws.kg();
  std::ostringstream summary;
  summary << "project:";
  std::size_t done = 0;
  for (const char* name : {"train", "valid", "test"}) {
    if (!ws.cfg().has(name)) continue;
    const std::vector<QaExample>& split = ws.split(name);
    std::vector<LabeledQuestion> labeled(split.size());
    parallel_for(split.size(), ws.pipeline_options().threads, [&](std::size_t i) {
      labeled[i] = project_entity(split[i].question, split[i].subject, kg);
    });
    fs::create_directories(ws.path("labeled"));
    save_labeled_corpus(ws.path(std::string("labeled/") + name + ".tsv"), labeled);
    ProjectionCounts c = count_kinds(labeled);
    summary << (done++ ? ";" : "") << ' ' << name << ' ' << c.exact << " exact, " << c.fuzzy
            << " fuzzy, " << c.failed << " failed";
  }
  if (done == 0) throw ConfigError("missing config field 'train'");
  ws.out() << summary.str() << " -> " << ws.path("labeled").string() << '\n';
  return 0;
}

int cmd_train_ed(Workspace& ws) {
  auto labeled = load_labeled_corpus(ws.artifact("labeled/train.tsv", "project"));
  std::vector<CrfExample> examples = crf_examples(labeled);
  std::vector<double> history;
  CrfModel model = train_crf(examples, crf_config(ws.cfg()), &history);
  model.save(ws.path("crf.model"));
  ws.out() << "train-ed: " << examples.size() << " sentences, " << model.vocab().size()
           << " features, objective " << io::format_double(history.empty() ? 0.0 : history.back())
           << " -> " << ws.path("crf.model").string() << '\n';
  return 0;
}

int cmd_train_rp(Workspace& ws) {
  std::vector<LrExample> examples = lr_examples(ws.split("train"));
  std::vector<double> history;
  LrModel model = train_lr(make_lr(ws, examples), examples, lr_config(ws.cfg()), &history);
  model.save(ws.path("lr.model"));
  ws.out() << "train-rp: " << featurizer_name(model.kind()) << ", " << model.class_count()
           << " relations, dim " << model.dimension() << ", objective "
           << io::format_double(history.empty() ? 0.0 : history.back()) << " -> "
           << ws.path("lr.model").string() << '\n';
  return 0;
}

int cmd_link(Workspace& ws) {
  const std::string name = ws.eval_split();
  const KnowledgeGraph& kg = ws.kg();
  const InvertedIndex& idx = ws.index();
  const CrfModel& crf = ws.crf();
  const auto& split = ws.split(name);
  const PipelineOptions opt = ws.pipeline_options();
  const std::size_t depth = std::max<std::size_t>(50, opt.integrator.m);
  std::vector<QuestionAnalysis> qs(split.size());
  parallel_for(split.size(), opt.threads, [&](std::size_t q) {
    QuestionAnalysis& a = qs[q];
    a.tags = tag_tokens(crf, split[q].question.tokens);
    a.spans = extract_spans(a.tags);
    a.query = choose_linking_query(split[q].question.tokens, a.spans);
    for (const CandidateEntity& c : link(a.query, idx, kg, depth, opt.linker)) {
      a.entities.push_back(EntityScore{kg.mid(c.entity), c.lev_score});
    }
  });
  std::vector<std::vector<std::string>> ranked(split.size());
  std::vector<std::string> gold(split.size());
  for (std::size_t q = 0; q < split.size(); ++q) {
    for (const EntityScore& e : qs[q].entities) ranked[q].push_back(e.mid);
    gold[q] = split[q].subject;
  }
  const std::string rel = name + ".entities.tsv";
  ws.write(rel, format_entity_candidates(qs));
  ws.out() << "link: " << split.size() << " questions, R@1 "
           << percent(split.empty() ? 0.0 : recall_at_n(ranked, gold, 1)) << ", R@50 "
           << percent(split.empty() ? 0.0 : recall_at_n(ranked, gold, 50)) << " -> "
           << ws.path(rel).string() << '\n';
  return 0;
}

int cmd_predict_rel(Workspace& ws) {
  const std::string name = ws.eval_split();
  const LrModel& lr = ws.lr();
  const auto& split = ws.split(name);
  const PipelineOptions opt = ws.pipeline_options();
  const std::size_t depth = std::max<std::size_t>(5, opt.integrator.r);
  std::vector<QuestionAnalysis> qs(split.size());
  parallel_for(split.size(), opt.threads, [&](std::size_t q) {
    for (RelationScore& s : predict_topk(lr, split[q].question.tokens, depth)) {
      qs[q].relations.emplace_back(std::move(s.relation), s.probability);
    }
  });
  std::vector<std::vector<std::string>> ranked(split.size());
  std::vector<std::string> gold(split.size());
  for (std::size_t q = 0; q < split.size(); ++q) {
    for (const auto& r : qs[q].relations) ranked[q].push_back(r.first);
    gold[q] = split[q].relation;
  }
  const std::string rel = name + ".relations.tsv";
  ws.write(rel, format_relation_candidates(qs));
  ws.out() << "predict-rel: " << split.size() << " questions, R@1 "
           << percent(split.empty() ? 0.0 : recall_at_n(ranked, gold, 1)) << ", R@5 "
           << percent(split.empty() ? 0.0 : recall_at_n(ranked, gold, 5)) << " -> "
           << ws.path(rel).string() << '\n';
  return 0;
}

struct ExternalFiles {
  std::string entities;
  std::string relations;
};

struct LoadedExternal {
  std::optional<ExternalScores> entities;
  std::optional<ExternalScores> relations;
};

LoadedExternal load_external(Workspace& ws, const ExternalFiles& files, std::size_t questions) {
  LoadedExternal ext;
  auto load = [&](const std::string& path, const char* what) {
    if (!fs::exists(path)) throw ConfigError(std::string(what) + " scores file not found: " + path);
    ExternalScores s = load_external_scores(path, questions);
    if (s.skipped_unknown_qids) {
      ws.err() << "warning: " << path << ": skipped " << s.skipped_unknown_qids
               << " lines with unknown qids\n";
    }
    return s;
  };
  if (!files.entities.empty()) ext.entities = load(files.entities, "entity");
  if (!files.relations.empty()) ext.relations = load(files.relations, "relation");
  return ext;
}

// Builds the QA system, loading only the models the internal stages need.
QaSystem make_system(Workspace& ws, bool internal_entities, bool internal_relations) {
  const KnowledgeGraph& kg = ws.kg();
  const InvertedIndex* idx = internal_entities ? &ws.index() : nullptr;
  const CrfModel* crf = internal_entities ? &ws.crf() : nullptr;
  const LrModel* lr = internal_relations ? &ws.lr() : nullptr;
  return QaSystem(kg, idx, crf, lr, ws.pipeline_options());
}

int cmd_answer(Workspace& ws, const std::string& question, const ExternalFiles& files) {
  LoadedExternal ext = load_external(ws, files, 1);
  QaSystem sys = make_system(ws, !ext.entities, !ext.relations);
  auto first = [](const std::optional<ExternalScores>& s)
      -> const std::vector<std::pair<std::string, double>>* {
    if (!s) return nullptr;
    static const std::vector<std::pair<std::string, double>> kEmpty;
    auto it = s->by_qid.find(0);
    return it == s->by_qid.end() ? &kEmpty : &it->second;
  };
  const PipelineOptions& opt = sys.options();
  QuestionAnalysis a = sys.analyze(tokenize(question), first(ext.entities), first(ext.relations),
                                   opt.integrator.m, opt.integrator.r);
  if (a.answers.empty()) {
    ws.out() << "answer: no (entity, relation) pair found in the graph\n";
    return 0;
  }
  const AnswerTuple& t = a.answers.front();
  ws.out() << t.mid << '\t' << t.relation << '\t' << io::format_double(t.score) << '\n';
  return 0;
}

// Metrics are reported as percentages.
std::map<std::string, double> as_percent(const std::map<std::string, double>& metrics) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : metrics) {
    out[k] = (k == "answered_fraction" || k.find("r@") != std::string::npos ||
              k.find("detection") == 0 || k == "end_to_end_accuracy")
                 ? 100.0 * v
                 : v;
  }
  return out;
}

int cmd_evaluate(Workspace& ws, const ExternalFiles& files) {
  const std::string name = ws.eval_split();
  const auto& split = ws.split(name);
  LoadedExternal ext = load_external(ws, files, split.size());
  QaSystem sys = make_system(ws, !ext.entities, !ext.relations);
  ExternalOverrides over{ext.entities ? &*ext.entities : nullptr,
                         ext.relations ? &*ext.relations : nullptr};
  SplitEvaluation ev = evaluate_split(sys, split, ws.kg(), over);

  ws.write(name + ".entities.tsv", format_entity_candidates(ev.questions));
  ws.write(name + ".relations.tsv", format_relation_candidates(ev.questions));
  ws.write(name + ".answers.tsv", format_answers(ev.questions));
  std::map<std::string, double> pct = as_percent(ev.metrics);
  RunReport report = aggregate_runs({pct}, {});
  ws.write("report.tsv", report.to_tsv());
  std::ostringstream text;
  text << "split: " << name << " (" << split.size() << " questions)\n";
  for (const auto& [k, v] : pct) text << k << ": " << format_score(v) << '\n';
  ws.write("report.txt", text.str());
  ws.out() << "evaluate: " << name << ", " << split.size() << " questions, end-to-end accuracy "
           << format_score(pct["end_to_end_accuracy"]) << " -> " << ws.path("report.txt").string()
           << '\n';
  return 0;
}

int cmd_multirun(Workspace& ws, std::size_t seeds) {
  if (seeds == 0) throw ConfigError("--seeds must be at least 1");
  const std::string name = ws.eval_split();
  const KnowledgeGraph& kg = ws.kg();
  const InvertedIndex& idx = ws.index();
  auto labeled = load_labeled_corpus(ws.artifact("labeled/train.tsv", "project"));
  std::vector<CrfExample> crf_ex = crf_examples(labeled);
  std::vector<LrExample> lr_ex = lr_examples(ws.split("train"));
  const auto& split = ws.split(name);
  LrModel untrained = make_lr(ws, lr_ex);

  std::vector<std::map<std::string, double>> runs;
  std::vector<std::uint64_t> seed_list;
  for (std::size_t i = 0; i < seeds; ++i) {
    CrfTrainConfig cc = crf_config(ws.cfg());
    LrTrainConfig lc = lr_config(ws.cfg());
    cc.seed += i;
    lc.seed += i;
    seed_list.push_back(cc.seed);
    CrfModel crf = train_crf(crf_ex, cc);
    LrModel lr = train_lr(untrained, lr_ex, lc);
    QaSystem sys(kg, &idx, &crf, &lr, ws.pipeline_options());
    runs.push_back(as_percent(evaluate_split(sys, split, kg).metrics));
  }
  RunReport report = aggregate_runs(runs, seed_list);
  ws.write("multirun.tsv", report.to_tsv());
  ws.write("multirun.txt", report.to_text());
  ws.out() << "multirun: " << seeds << " seeds on " << name << ", end_to_end_accuracy "
           << format_summary(report.metrics.at("end_to_end_accuracy")) << " -> "
           << ws.path("multirun.txt").string() << '\n';
  return 0;
}

int cmd_make_toy(const Config& cfg, std::ostream& out, std::uint64_t seed) {
  fs::path dir = cfg.require("out");
  SyntheticOptions opt;
  opt.seed = seed;
  SyntheticDataset data = make_synthetic_dataset(opt);
  write_synthetic_dataset(data, dir);
  std::string conf =
      "triples = triples.tsv\n"
      "names = names.tsv\n"
      "wiki = wiki.txt\n"
      "train = train.tsv\n"
      "valid = valid.tsv\n"
      "test = test.tsv\n"
      "embeddings = embeddings.txt\n"
      "out = run\n";
  io::write_file_atomic(dir / "kgqa.conf", conf);
  out << "make-toy: " << data.entity_count << " entities, " << data.relations.size()
      << " relations -> " << (dir / "kgqa.conf").string() << '\n';
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Question answering over a knowledge graph: data preparation, training, evaluation."};
  app.name("kgqa");
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--set", overrides, "Override one config field (key=value); repeatable")
      ->take_all();
  app.add_option("--out", out_dir, "Output directory (overrides KGQA_OUT and the config file)");

  app.add_subcommand("build-kg", "Load triples, names and wiki ids into the output directory");
  app.add_subcommand("build-index", "Build the n-gram inverted index over entity names");
  app.add_subcommand("project", "Derive token-level entity tags for each configured split");
  app.add_subcommand("train-ed", "Train the CRF entity detector");
  app.add_subcommand("train-rp", "Train the logistic-regression relation classifier");
  app.add_subcommand("link", "Dump ranked entity candidates for the evaluation split");
  app.add_subcommand("predict-rel", "Dump ranked relation candidates for the evaluation split");

  ExternalFiles answer_ext, eval_ext;
  std::string question;
  CLI::App* answer = app.add_subcommand("answer", "Answer one question");
  answer->add_option("question", question, "Question text")->required();
  answer->add_option("--entity-scores", answer_ext.entities, "External entity scores (qid 0)");
  answer->add_option("--relation-scores", answer_ext.relations, "External relation scores (qid 0)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate the pipeline on the evaluation split");
  evaluate->add_option("--entity-scores", eval_ext.entities, "External entity scores TSV");
  evaluate->add_option("--relation-scores", eval_ext.relations, "External relation scores TSV");

  std::size_t seeds = 3;
  CLI::App* multirun = app.add_subcommand("multirun", "Retrain and evaluate over several seeds");
  multirun->add_option("--seeds", seeds, "Number of seeds")->required();

  std::uint64_t toy_seed = 7;
  CLI::App* make_toy = app.add_subcommand("make-toy", "Write the bundled synthetic dataset");
  make_toy->add_option("--seed", toy_seed, "Generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Config cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    if (const char* env = std::getenv("KGQA_OUT"); env && *env) cfg.put("out", env);
    for (const std::string& s : overrides) cfg.set(s);
    if (!out_dir.empty()) cfg.put("out", out_dir);

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "make-toy") return cmd_make_toy(cfg, out, toy_seed);

    Workspace ws(cfg, out, err);
    fs::create_directories(ws.path(""));
    if (name == "build-kg") return cmd_build_kg(ws);
    if (name == "build-index") return cmd_build_index(ws);
    if (name == "project") return cmd_project(ws);
    if (name == "train-ed") return cmd_train_ed(ws);
    if (name == "train-rp") return cmd_train_rp(ws);
    if (name == "link") return cmd_link(ws);
    if (name == "predict-rel") return cmd_predict_rel(ws);
    if (name == "answer") return cmd_answer(ws, question, answer_ext);
    if (name == "evaluate") return cmd_evaluate(ws, eval_ext);
    if (name == "multirun") return cmd_multirun(ws, seeds);
    err << "error: unhandled subcommand " << name << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DependencyError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace kgqa::cli
