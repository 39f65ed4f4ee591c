#include "kgqa/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kgqa/text_io.h"
#include "kgqa/text_prep.h"

namespace kgqa {
namespace {

enum Type {
  kPerson, kLocation, kFilm, kOrganization, kAlbum, kBook, kTeam, kLanguage, kGenre,
  kProfession, kAward, kGender, kReligion, kEthnicity, kSport, kTimeZone, kCurrency,
  kYear, kIndustry, kReleaseType, kTypeCount
};

struct RelationSpec {
  const char* name;
  Type subject;
  Type object;
  double coverage;
  int max_objects;
  std::vector<const char*> templates;
};

const std::vector<RelationSpec>& relation_specs() {
  static const std::vector<RelationSpec> specs = {
      {"people/person/place_of_birth", kPerson, kLocation, 0.9, 1,
       {"where was {e} born ?", "what city was {e} born in ?", "what is the birthplace of {e} ?"}},
      {"people/person/place_of_death", kPerson, kLocation, 0.3, 1,
       {"where did {e} die ?", "in what place did {e} pass away ?"}},
      {"people/person/nationality", kPerson, kLocation, 0.7, 1,
       {"what is the nationality of {e} ?", "what country is {e} a citizen of ?"}},
      {"people/person/profession", kPerson, kProfession, 0.8, 2,
       {"what is {e} 's profession ?", "what does {e} do for a living ?"}},
      {"people/person/gender", kPerson, kGender, 0.9, 1,
       {"what gender is {e} ?", "is {e} male or female ?"}},
      {"people/person/languages", kPerson, kLanguage, 0.4, 2,
       {"what language does {e} speak ?", "which languages can {e} speak ?"}},
      {"people/person/religion", kPerson, kReligion, 0.3, 1,
       {"what religion does {e} practice ?", "what faith does {e} follow ?"}},
      {"people/person/education", kPerson, kOrganization, 0.4, 1,
       {"where did {e} go to school ?", "which school did {e} attend ?"}},
      {"people/person/spouse", kPerson, kPerson, 0.3, 1,
       {"who is {e} married to ?", "who was the spouse of {e} ?"}},
      {"people/person/parents", kPerson, kPerson, 0.3, 2,
       {"who is the parent of {e} ?", "who are {e} 's parents ?"}},
      {"people/person/children", kPerson, kPerson, 0.3, 2,
       {"who are the children of {e} ?", "name a child of {e}"}},
      {"people/person/ethnicity", kPerson, kEthnicity, 0.3, 1,
       {"what ethnicity is {e} ?", "what ethnic group does {e} belong to ?"}},
      {"people/person/employment_history", kPerson, kOrganization, 0.3, 1,
       {"who did {e} work for ?", "which company employed {e} ?"}},
      {"music/artist/genre", kPerson, kGenre, 0.3, 2,
       {"what kind of music does {e} play ?", "what musical genre is {e} known for ?"}},
      {"music/artist/album", kPerson, kAlbum, 0.2, 2,
       {"name an album by {e}", "what album did {e} release ?"}},
      {"music/artist/label", kPerson, kOrganization, 0.2, 1,
       {"what record label is {e} signed to ?", "which label released music by {e} ?"}},
      {"film/actor/film", kPerson, kFilm, 0.3, 2,
       {"what movie did {e} act in ?", "which film did {e} appear in ?"}},
      {"film/director/film", kPerson, kFilm, 0.2, 2,
       {"what film did {e} direct ?", "name a movie directed by {e}"}},
      {"book/author/works_written", kPerson, kBook, 0.2, 2,
       {"what book did {e} write ?", "name a novel written by {e}"}},
      {"award/award_winner/awards_won", kPerson, kAward, 0.3, 1,
       {"what award did {e} win ?", "which honor was given to {e} ?"}},
      {"sports/pro_athlete/teams", kPerson, kTeam, 0.2, 2,
       {"what team did {e} play for ?", "which club has {e} played on ?"}},
      {"sports/pro_athlete/sport", kPerson, kSport, 0.2, 1,
       {"what sport does {e} play ?", "which sport is {e} an athlete in ?"}},
      {"location/location/containedby", kLocation, kLocation, 0.8, 1,
       {"what country is {e} located in ?", "where is {e} situated ?"}},
      {"location/location/time_zones", kLocation, kTimeZone, 0.7, 1,
       {"what time zone is {e} in ?", "which timezone does {e} use ?"}},
      {"location/country/official_language", kLocation, kLanguage, 0.5, 1,
       {"what is the official language of {e} ?", "what language is spoken officially in {e} ?"}},
      {"location/country/capital", kLocation, kLocation, 0.4, 1,
       {"what is the capital of {e} ?", "which city is the capital of {e} ?"}},
      {"location/location/people_born_here", kLocation, kPerson, 0.6, 2,
       {"who was born in {e} ?", "name a person born in {e}"}},
      {"location/location/contains", kLocation, kLocation, 0.5, 2,
       {"what is a town inside {e} ?", "name a place contained in {e}"}},
      {"location/country/currency_used", kLocation, kCurrency, 0.5, 1,
       {"what currency is used in {e} ?", "what money do people use in {e} ?"}},
      {"travel/travel_destination/tourist_attractions", kLocation, kLocation, 0.3, 2,
       {"what is a tourist attraction in {e} ?", "what should tourists visit in {e} ?"}},
      {"film/film/directed_by", kFilm, kPerson, 0.9, 1,
       {"who directed {e} ?", "who was the director of {e} ?"}},
      {"film/film/genre", kFilm, kGenre, 0.8, 2,
       {"what genre is the film {e} ?", "what kind of movie is {e} ?"}},
      {"film/film/country", kFilm, kLocation, 0.6, 1,
       {"which country produced the film {e} ?", "what country is the movie {e} from ?"}},
      {"film/film/language", kFilm, kLanguage, 0.6, 1,
       {"what language is the film {e} in ?", "in which language was {e} filmed ?"}},
      {"film/film/starring", kFilm, kPerson, 0.7, 2,
       {"who starred in {e} ?", "who acted in the movie {e} ?"}},
      {"film/film/initial_release_date", kFilm, kYear, 0.7, 1,
       {"when was {e} released ?", "what year did the film {e} come out ?"}},
      {"film/film/produced_by", kFilm, kPerson, 0.4, 1,
       {"who produced {e} ?", "who was the producer of the film {e} ?"}},
      {"film/film/music", kFilm, kPerson, 0.4, 1,
       {"who composed the music for {e} ?", "who wrote the score of {e} ?"}},
      {"organization/organization/headquarters", kOrganization, kLocation, 0.8, 1,
       {"where is {e} headquartered ?", "where are the headquarters of {e} ?"}},
      {"organization/organization/founders", kOrganization, kPerson, 0.6, 2,
       {"who founded {e} ?", "who started the organization {e} ?"}},
      {"business/business_operation/industry", kOrganization, kIndustry, 0.7, 1,
       {"what industry is {e} in ?", "what business sector does {e} operate in ?"}},
      {"organization/organization/date_founded", kOrganization, kYear, 0.6, 1,
       {"what year was {e} founded ?", "when was {e} established ?"}},
      {"music/album/artist", kAlbum, kPerson, 0.9, 1,
       {"who recorded the album {e} ?", "which artist made {e} ?"}},
      {"music/album/genre", kAlbum, kGenre, 0.7, 1,
       {"what style of music is the album {e} ?", "how would you classify the record {e} ?"}},
      {"music/album/release_type", kAlbum, kReleaseType, 0.7, 1,
       {"what type of release is {e} ?", "was {e} released as an album or a single ?"}},
      {"book/written_work/author", kBook, kPerson, 0.9, 1,
       {"who wrote {e} ?", "who is the author of {e} ?"}},
      {"book/written_work/subjects", kBook, kGenre, 0.5, 1,
       {"what is the book {e} about ?", "what subject does {e} cover ?"}},
      {"book/book/genre", kBook, kGenre, 0.6, 1,
       {"what genre of book is {e} ?", "what literary category is {e} ?"}},
      {"sports/sports_team/location", kTeam, kLocation, 0.9, 1,
       {"where is the team {e} based ?", "what city does {e} play home games in ?"}},
      {"sports/sports_team/sport", kTeam, kSport, 0.9, 1,
       {"what sport does the team {e} compete in ?", "{e} is a team in which sport ?"}},
  };
  return specs;
}

const std::vector<std::string> kSyllables = {
    "ka", "ro", "vel", "min", "dor", "sha", "lu", "ten", "bra", "gor", "nis", "pa", "zel", "mar",
    "qui", "fen", "tor", "len", "vik", "sar", "bel", "tam", "ur", "os", "ly", "dri", "ko", "ne",
    "jor", "bik", "sel", "vo", "gra", "mun", "pet", "zo"};

const std::vector<std::string> kFirstNames = {
    "alice", "boris", "carla", "dmitri", "elena", "felix", "greta", "hugo", "irina", "jonas",
    "karin", "luca", "marta", "nikolai", "olga", "pavel", "quinn", "rosa", "stefan", "tanja",
    "ugo", "vera", "walter", "xenia", "yuri", "zora", "anton", "bianca", "cyril", "daria",
    "emil", "freya", "goran", "hanna", "ivan", "jana", "kiril", "lena", "milos", "nadia"};

const std::vector<std::string> kAdjectives = {
    "silent", "broken", "golden", "last", "hidden", "crimson", "distant", "frozen",
    "electric", "lonely", "savage", "velvet", "burning", "quiet"};
const std::vector<std::string> kFilmNouns = {
    "river", "empire", "garden", "horizon", "storm", "mirror", "kingdom", "harbor",
    "echo", "shadow", "circle", "voyage", "machine", "orchard"};
const std::vector<std::string> kAlbumNouns = {"dreams", "lights", "nights", "waves", "roads",
                                              "hearts", "fires", "skies", "stones", "tides"};
const std::vector<std::string> kBookNouns = {"chronicles", "secrets", "letters", "songs",
                                             "tales", "memoirs", "ghosts", "maps"};
const std::vector<std::string> kOrgSuffixes = {"corporation", "records", "university", "institute",
                                               "group", "labs", "studios", "bank"};
const std::vector<std::string> kMascots = {"lions", "rangers", "falcons", "united",
                                           "wolves", "comets", "titans", "hawks"};

std::vector<std::string> fixed_names(Type t) {
  switch (t) {
    case kGenre:
      return {"jazz", "blues", "hip hop", "reggae", "techno", "punk rock", "heavy metal", "folk",
              "soul", "disco", "drama", "comedy", "thriller", "horror", "western", "romance",
              "documentary", "animation", "science fiction", "fantasy", "mystery", "satire",
              "poetry", "biography", "adventure", "crime fiction", "opera", "gospel", "ambient",
              "bluegrass"};
    case kProfession:
      return {"actor", "singer", "lawyer", "physician", "architect", "painter", "journalist",
              "engineer", "politician", "chef", "novelist", "dancer", "photographer", "composer",
              "economist", "farmer", "pilot", "teacher", "sculptor", "chemist", "diplomat",
              "basketball player", "film producer", "poet", "historian"};
    case kGender: return {"male", "female"};
    case kReligion:
      return {"christianity", "islam", "judaism", "buddhism", "hinduism", "sikhism", "taoism",
              "atheism"};
    case kEthnicity:
      return {"slovenes", "serbs", "croats", "greeks", "finns", "basques", "catalans", "welsh people",
              "maori", "armenians"};
    case kSport:
      return {"basketball", "soccer", "tennis", "baseball", "ice hockey", "cricket", "rugby",
              "volleyball", "golf", "cycling"};
    case kTimeZone:
      return {"central european time", "eastern time zone", "pacific time zone", "greenwich mean time",
              "japan standard time", "india standard time", "mountain time zone", "central time zone"};
    case kCurrency:
      return {"euro", "us dollar", "pound sterling", "japanese yen", "swiss franc", "indian rupee",
              "brazilian real", "russian ruble", "swedish krona", "mexican peso"};
    case kIndustry:
      return {"banking", "software", "automotive", "mining", "pharmaceuticals", "retail",
              "publishing", "aerospace", "telecommunications", "agriculture", "entertainment",
              "energy"};
    case kReleaseType: return {"album", "single", "ep"};
    default: return {};
  }
}

class Generator {
 public:
  explicit Generator(const SyntheticOptions& opt) : opt_(opt), rng_(opt.seed) {
    for (const RelationSpec& r : relation_specs()) {
      for (const char* t : r.templates) {
        for (const std::string& tok : tokenize(t).tokens) reserved_.insert(tok);
      }
    }
  }

  SyntheticDataset run();

 private:
  struct Entity {
    std::string mid;
    Type type;
    std::string name;                 // lowercase canonical
    std::vector<std::string> aliases; // additional
  };

  std::size_t uniform(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  double unit() { return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0); }
  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[uniform(v.size())]; }

  std::string syllable_word(std::size_t min_syl, std::size_t max_syl) {
    while (true) {
      std::size_t n = min_syl + uniform(max_syl - min_syl + 1);
      std::string w;
      for (std::size_t i = 0; i < n; ++i) w += pick(kSyllables);
      if (!reserved_.count(w)) return w;
    }
  }

  std::string make_name(Type t) {
    switch (t) {
      case kPerson: {
        std::string last = syllable_word(2, 3);
        static const std::vector<std::string> suffixes = {"", "", "son", "ski", "ic", "ez", "er"};
        return pick(kFirstNames) + " " + last + pick(suffixes);
      }
      case kLocation: {
        std::string w = syllable_word(2, 3);
        double u = unit();
        if (u < 0.1) return "new " + w;
        if (u < 0.18) return "port " + w;
        if (u < 0.25) return "san " + w;
        return w;
      }
      case kFilm: {
        std::string core = pick(kAdjectives) + " " + pick(kFilmNouns);
        return unit() < 0.5 ? "the " + core : core;
      }
      case kOrganization: return syllable_word(2, 2) + " " + pick(kOrgSuffixes);
      case kAlbum: return pick(kAdjectives) + " " + pick(kAlbumNouns);
      case kBook: return pick(kBookNouns) + " of " + syllable_word(2, 3);
      case kTeam: return syllable_word(2, 3) + " " + pick(kMascots);
      case kLanguage: {
        static const std::vector<std::string> suffixes = {"ese", "ian", "ish", "ic"};
        return syllable_word(1, 2) + pick(suffixes);
      }
      case kAward: {
        double u = unit();
        if (u < 0.4) return syllable_word(2, 2) + " prize";
        if (u < 0.7) return pick(kAdjectives) + " medal";
        return "golden " + syllable_word(1, 2) + " award";
      }
      case kYear: return std::to_string(1950 + uniform(70));
      default: return {};
    }
  }

  std::string next_mid() {
    static const char* digits = "0123456789bcdfghjklmnpqrstvwxyz_";
    std::uint64_t v = 0x2c5a1 + 7919 * mid_counter_++;
    std::string s;
    while (v) {
      s.push_back(digits[v % 32]);
      v /= 32;
    }
    return "m.0" + s;
  }

  std::size_t add_entity(Type t, std::string name) {
    entities_.push_back(Entity{next_mid(), t, std::move(name), {}});
    by_type_[t].push_back(entities_.size() - 1);
    return entities_.size() - 1;
  }

  static std::string display(const std::string& name) {
    std::string out = name;
    bool start = true;
    for (char& c : out) {
      if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      start = c == ' ';
    }
    return out;
  }

  SyntheticOptions opt_;
  std::mt19937_64 rng_;
  std::unordered_set<std::string> reserved_;
  std::vector<Entity> entities_;
  std::vector<std::size_t> by_type_[kTypeCount];
  std::uint64_t mid_counter_ = 0;
};

SyntheticDataset Generator::run() {
  SyntheticDataset out;
  const std::map<Type, std::size_t> counts = {
      {kPerson, 380}, {kLocation, 160}, {kFilm, 120}, {kOrganization, 80}, {kAlbum, 60},
      {kBook, 60}, {kTeam, 40}, {kLanguage, 20}, {kAward, 25}, {kYear, 40}};

  std::set<std::string> used;
  const std::size_t sasha = add_entity(kPerson, "sasha vujacic");
  const std::size_t maribor = add_entity(kLocation, "maribor");
  const std::size_t adam1 = add_entity(kPerson, "adam smith");
  const std::size_t adam2 = add_entity(kPerson, "adam smith");
  used.insert({"sasha vujacic", "maribor", "adam smith"});

  for (int t = 0; t < kTypeCount; ++t) {
    const Type type = static_cast<Type>(t);
    std::vector<std::string> fixed = fixed_names(type);
    if (!fixed.empty()) {
      for (std::string& n : fixed) {
        used.insert(n);
        add_entity(type, std::move(n));
      }
      continue;
    }
    auto it = counts.find(type);
    if (it == counts.end()) continue;
    std::size_t target = it->second;
    std::size_t attempts = 0;
    while (by_type_[type].size() < target && attempts++ < target * 200) {
      std::string n = make_name(type);
      if (!used.insert(n).second) continue;
      add_entity(type, std::move(n));
    }
  }

  // Secondary aliases: films without the article, some locations with a
  // "city" suffix.
  for (Entity& e : entities_) {
    if (e.type == kFilm && e.name.rfind("the ", 0) == 0) e.aliases.push_back(e.name.substr(4));
    if (e.type == kLocation && e.name.find(' ') == std::string::npos && unit() < 0.2) {
      e.aliases.push_back(e.name + " city");
    }
  }

  // Facts.
  const auto& specs = relation_specs();
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> triples;  // (s, rel, o)
  for (std::size_t r = 0; r < specs.size(); ++r) {
    const RelationSpec& spec = specs[r];
    const auto& objects = by_type_[spec.object];
    for (std::size_t s : by_type_[spec.subject]) {
      if (unit() >= spec.coverage) continue;
      const std::size_t k = 1 + uniform(static_cast<std::size_t>(spec.max_objects));
      for (std::size_t i = 0; i < k; ++i) {
        std::size_t o = pick(objects);
        if (o != s) triples.emplace(s, r, o);
      }
    }
    out.relations.emplace_back(spec.name);
  }
  auto rel_index = [&](std::string_view name) {
    for (std::size_t r = 0; r < specs.size(); ++r) {
      if (name == specs[r].name) return r;
    }
    return specs.size();
  };
  triples.emplace(sasha, rel_index("people/person/place_of_birth"), maribor);
  std::erase_if(triples, [&](const auto& t) {
    return std::get<0>(t) == sasha && std::get<1>(t) == rel_index("people/person/place_of_birth") &&
           std::get<2>(t) != maribor;
  });
  triples.emplace(sasha, rel_index("people/person/profession"),
                  by_type_[kProfession][0]);
  triples.emplace(sasha, rel_index("sports/pro_athlete/sport"), by_type_[kSport][0]);
  triples.emplace(adam1, rel_index("people/person/nationality"), maribor);
  triples.emplace(adam2, rel_index("people/person/nationality"), maribor);

  auto in_degree = [&](std::size_t e) {
    std::size_t d = 0;
    for (const auto& t : triples) d += std::get<2>(t) == e;
    return d;
  };
  // Make the two namesakes differ clearly in popularity.
  const std::size_t children = rel_index("people/person/children");
  std::size_t guard = 0;
  while (in_degree(adam1) < in_degree(adam2) + 5 && guard++ < 1000) {
    std::size_t parent = pick(by_type_[kPerson]);
    if (parent != adam1 && parent != adam2) triples.emplace(parent, children, adam1);
  }
  out.adam_smith_mids = {entities_[adam1].mid, entities_[adam2].mid};
  out.sasha_vujacic_mid = entities_[sasha].mid;
  out.maribor_mid = entities_[maribor].mid;

  std::map<std::string, std::size_t> label_counts;
  for (const Entity& e : entities_) ++label_counts[e.name];
  for (const auto& [label, c] : label_counts) {
    if (c > 1) out.ambiguous_labels.push_back(label);
  }

  // Keep only entities that occur in some triple.
  std::vector<bool> in_graph(entities_.size(), false);
  for (const auto& [s, r, o] : triples) in_graph[s] = in_graph[o] = true;

  std::ostringstream tr, nm, wk;
  for (const auto& [s, r, o] : triples) {
    tr << "www.freebase.com/m/" << entities_[s].mid.substr(2) << '\t' << "www.freebase.com/"
       << specs[r].name << '\t' << "www.freebase.com/m/" << entities_[o].mid.substr(2) << '\n';
  }
  for (std::size_t e = 0; e < entities_.size(); ++e) {
    if (!in_graph[e]) continue;
    ++out.entity_count;
    nm << entities_[e].mid << '\t' << display(entities_[e].name) << '\n';
    for (const std::string& a : entities_[e].aliases) nm << entities_[e].mid << '\t' << display(a) << '\n';
    if (unit() < 0.6) wk << entities_[e].mid << '\n';
  }
  out.triples_tsv = tr.str();
  out.names_tsv = nm.str();
  out.wiki_txt = wk.str();

  // Questions: relation uniformly, then one of its triples uniformly.
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>> per_relation(specs.size());
  for (const auto& t : triples) per_relation[std::get<1>(t)].push_back(t);
  std::vector<std::size_t> nonempty;
  for (std::size_t r = 0; r < specs.size(); ++r) {
    if (!per_relation[r].empty()) nonempty.push_back(r);
  }

  std::set<std::string> vocab;
  auto make_split = [&](std::size_t count) {
    std::ostringstream s;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t r = pick(nonempty);
      const auto& [subj, rel, obj] = pick(per_relation[r]);
      const Entity& e = entities_[subj];
      std::string name = e.name;
      if (!e.aliases.empty() && unit() < 0.15) name = pick(e.aliases);
      // Occasional misspelling so projection has to fall back to fuzzy matching.
      if (unit() < 0.05) {
        std::size_t at = name.rfind(' ') == std::string::npos ? 0 : name.rfind(' ') + 1;
        if (name.size() - at >= 5) name.erase(at + 2 + uniform(name.size() - at - 3), 1);
      }
      if (unit() < 0.8) name = display(name);
      std::string text = pick(specs[r].templates);
      text.replace(text.find("{e}"), 3, name);
      if (unit() < 0.5 && text.size() > 2 && text.substr(text.size() - 2) == " ?") {
        text.erase(text.size() - 2, 1);
      }
      if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 'a' + 'A');
      for (const std::string& tok : tokenize(text).tokens) vocab.insert(tok);
      s << "www.freebase.com/m/" << e.mid.substr(2) << '\t' << "www.freebase.com/" << specs[r].name
        << '\t' << "www.freebase.com/m/" << entities_[obj].mid.substr(2) << '\t' << text << '\n';
    }
    return s.str();
  };
  out.train_tsv = make_split(opt_.train_questions);
  out.valid_tsv = make_split(opt_.valid_questions);
  out.test_tsv = make_split(opt_.test_questions);

  for (const Entity& e : entities_) {
    for (const std::string& tok : tokenize(e.name).tokens) vocab.insert(tok);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::ostringstream emb;
  char buf[32];
  for (const std::string& tok : vocab) {
    emb << tok;
    for (std::size_t d = 0; d < 300; ++d) {
      std::snprintf(buf, sizeof(buf), " %.5f", gauss(rng_) / std::sqrt(300.0) * 4.0);
      emb << buf;
    }
    emb << '\n';
  }
  out.embeddings_txt = emb.str();
  return out;
}

}  // namespace

SyntheticDataset make_synthetic_dataset(const SyntheticOptions& options) {
  return Generator(options).run();
}

void write_synthetic_dataset(const SyntheticDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file_atomic(dir / "triples.tsv", data.triples_tsv);
  io::write_file_atomic(dir / "names.tsv", data.names_tsv);
  io::write_file_atomic(dir / "wiki.txt", data.wiki_txt);
  io::write_file_atomic(dir / "train.tsv", data.train_tsv);
  io::write_file_atomic(dir / "valid.tsv", data.valid_tsv);
  io::write_file_atomic(dir / "test.tsv", data.test_tsv);
  io::write_file_atomic(dir / "embeddings.txt", data.embeddings_txt);
}

}  // namespace kgqa
