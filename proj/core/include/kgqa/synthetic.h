#pragma once

// Deterministic desk-scale fixture: a ~1.1k-entity, 50-relation knowledge
// graph with a names file, Wikipedia mapping, templated question splits and
// 300-d embeddings for the question vocabulary.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace kgqa {

struct SyntheticOptions {
  std::uint64_t seed = 7;
  std::size_t train_questions = 3000;
  std::size_t valid_questions = 500;
  std::size_t test_questions = 500;
};

struct SyntheticDataset {
  std::string triples_tsv;
  std::string names_tsv;
  std::string wiki_txt;
  std::string train_tsv;
  std::string valid_tsv;
  std::string test_tsv;
  std::string embeddings_txt;

  std::vector<std::string> relations;
  std::size_t entity_count = 0;
  // Fixed entities used by the exemplar scenarios.
  std::string sasha_vujacic_mid;
  std::string maribor_mid;
  std::vector<std::string> adam_smith_mids;  // higher in-degree first
  // Canonical labels shared by more than one entity.
  std::vector<std::string> ambiguous_labels;
};

SyntheticDataset make_synthetic_dataset(const SyntheticOptions& options = {});

// Writes triples.tsv, names.tsv, wiki.txt, train.tsv, valid.tsv, test.tsv
// and embeddings.txt into `dir`.
void write_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& dir);

}  // namespace kgqa
