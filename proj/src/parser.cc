/* Copyright 2026 The sgmod Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "sgmod/parser.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sgmod/errors.h"
#include "sgmod/json_repair.h"

namespace sgmod {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxFragmentBytes = 200;

std::string Snippet(std::string_view text) {
  if (text.size() <= kMaxFragmentBytes) return std::string(text);
  return std::string(text.substr(0, kMaxFragmentBytes)) + "...";
}

std::string JsonSnippet(const json& value) {
  return Snippet(value.dump(-1, ' ', false, json::error_handler_t::replace));
}

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Canonical (class, identity) with an indication of whether the text carried
// an explicit ":n" suffix.
struct ParsedName {
  ObjectRef ref;
  bool explicit_identity = false;
};

ParsedName ParseName(std::string_view text, const Vocabulary& vocab) {
  const std::string folded = FoldTerm(text);
  ObjectRef ref = ObjectRef::Parse(folded);
  const bool explicit_identity = ref.class_name != folded;
  ref.class_name = vocab.Canonicalize(ref.class_name);
  return {std::move(ref), explicit_identity};
}

// Resolves identities for one frame's objects. Classes where any instance
// carries an explicit suffix keep the written identities (bare name = 0);
// other classes are numbered in raster order.
void ResolveIdentities(std::vector<ObjectInstance>& objects,
                       const std::vector<bool>& explicit_identity) {
  std::set<std::string> explicit_classes;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (explicit_identity[i]) explicit_classes.insert(objects[i].class_name);
  }
  std::vector<std::size_t> implicit;
  std::vector<ObjectInstance> to_number;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (!explicit_classes.contains(objects[i].class_name)) {
      implicit.push_back(i);
      to_number.push_back(objects[i]);
    }
  }
  to_number = AssignSuffixIds(std::move(to_number));
  for (std::size_t k = 0; k < implicit.size(); ++k) {
    objects[implicit[k]].identity = to_number[k].identity;
  }
}

// ---------------------------------------------------------------------------
// Ground truth (strict)

class LineError {
 public:
  explicit LineError(std::size_t line) : line_(line) {}

  [[noreturn]] void Fail(std::string_view field, std::string_view what) const {
    std::ostringstream out;
    out << "line " << line_ << ": field '" << field << "': " << what;
    throw InputError(out.str());
  }

 private:
  std::size_t line_;
};

const json& Require(const json& obj, const char* field, const LineError& err) {
  auto it = obj.find(field);
  if (it == obj.end()) err.Fail(field, "missing required field");
  return *it;
}

std::string RequireString(const json& obj, const char* field,
                          const LineError& err) {
  const json& v = Require(obj, field, err);
  if (!v.is_string()) err.Fail(field, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> RequireStringArray(const json& v, std::string_view field,
                                            const LineError& err) {
  if (!v.is_array()) err.Fail(field, "expected a list of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) err.Fail(field, "expected a list of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

BoundingBox StrictBox(const json& v, const std::string& field,
                      const LineError& err) {
  if (!v.is_array() || v.size() != 4) {
    err.Fail(field, "box must be [y_min, x_min, y_max, x_max]");
  }
  int c[4];
  for (int i = 0; i < 4; ++i) {
    if (!v[i].is_number_integer()) err.Fail(field, "box coordinates must be integers");
    const auto value = v[i].get<std::int64_t>();
    if (value < 0 || value > BoundingBox::kScale) {
      err.Fail(field, "box coordinate outside [0, 1000]");
    }
    c[i] = static_cast<int>(value);
  }
  BoundingBox box{c[0], c[1], c[2], c[3]};
  if (!box.IsValid()) err.Fail(field, "box requires y_min <= y_max and x_min <= x_max");
  return box;
}

// ---------------------------------------------------------------------------
// Predictions (lenient)

class LenientParser {
 public:
  LenientParser(const Vocabulary& vocab, ParseOutcome& out)
      : vocab_(vocab), out_(out) {}

  // True once a JSON payload carried at least one graph key; an empty but
  // well-formed graph is a valid prediction.
  bool graph_shaped() const { return graph_shaped_; }

  void Drop(std::string fragment, std::string reason) {
    out_.dropped.push_back({Snippet(fragment), std::move(reason)});
  }

  void ParseJsonGraph(std::string_view payload) {
    auto repaired = RepairJsonObject(payload);
    if (!repaired) {
      Drop(std::string(payload), "unparseable json");
      return;
    }
    const json& root = repaired->value;
    for (const char* key : {"tags", "objects", "triplets", "relations", "caption", "unsafe"}) {
      if (root.contains(key)) graph_shaped_ = true;
    }
    ExtractTags(root);
    if (auto it = root.find("caption"); it != root.end()) {
      if (it->is_string()) {
        out_.graph.caption = it->get<std::string>();
      } else if (!it->is_null()) {
        Drop(JsonSnippet(*it), "caption not a string");
      }
    }
    if (auto it = root.find("unsafe"); it != root.end() && it->is_boolean()) {
      out_.graph.unsafe = it->get<bool>();
    }
    ExtractObjects(root);
    ExtractTriplets(root);
  }

  void ParseLoc(std::string_view payload) {
    auto objects = ParseLocDetection(payload, vocab_, &out_.dropped);
    out_.recovered += static_cast<int>(objects.size());
    out_.graph.objects = std::move(objects);
  }

  void ParseTriplets(std::string_view payload) {
    auto triplets = ParseSuffixTriplets(payload, vocab_, &out_.dropped);
    out_.recovered += static_cast<int>(triplets.size());
    out_.graph.triplets = std::move(triplets);
    DeclareEndpoints();
  }

 private:
  void ExtractTags(const json& root) {
    auto it = root.find("tags");
    if (it == root.end() || it->is_null()) return;
    std::vector<json> items;
    if (it->is_array()) {
      items.assign(it->begin(), it->end());
    } else {
      items.push_back(*it);
    }
    for (const auto& item : items) {
      if (!item.is_string()) {
        Drop(JsonSnippet(item), "tag not a string");
        continue;
      }
      const std::string tag = vocab_.Canonicalize(item.get<std::string>());
      if (!vocab_.IsTag(tag)) {
        Drop(item.get<std::string>(), "unknown tag");
        continue;
      }
      if (out_.graph.tags.insert(tag).second) ++out_.recovered;
    }
  }

  // Coerces a coordinate given as a number or numeric string.
  static std::optional<double> Coordinate(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const std::string s(Trim(v.get<std::string>()));
      double value = 0;
      const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec == std::errc() && end == s.data() + s.size() && !s.empty()) {
        return value;
      }
    }
    return std::nullopt;
  }

  void ExtractObjects(const json& root) {
    auto it = root.find("objects");
    if (it == root.end() || it->is_null()) return;
    if (it->is_string()) {
      // Some models emit the detection string in place of a list.
      ParseLoc(it->get<std::string>());
      objects_declared_ = !out_.graph.objects.empty();
      return;
    }
    if (!it->is_array()) {
      Drop(JsonSnippet(*it), "objects not a list");
      return;
    }
    std::vector<ObjectInstance> objects;
    std::vector<bool> explicit_identity;
    for (const auto& item : *it) {
      objects_declared_ = true;
      if (!item.is_object()) {
        Drop(JsonSnippet(item), "object not a JSON object");
        continue;
      }
      auto name_it = item.find("name");
      if (name_it == item.end()) name_it = item.find("class");
      if (name_it == item.end() || !name_it->is_string()) {
        Drop(JsonSnippet(item), "missing name");
        continue;
      }
      ParsedName name = ParseName(name_it->get<std::string>(), vocab_);
      if (!vocab_.IsObject(name.ref.class_name)) {
        Drop(JsonSnippet(item), "unknown object class");
        continue;
      }
      ObjectInstance object;
      object.class_name = name.ref.class_name;
      object.identity = name.ref.identity;

      auto box_it = item.find("box");
      if (box_it == item.end()) box_it = item.find("bbox");
      if (box_it != item.end() && !box_it->is_null()) {
        if (!box_it->is_array() || box_it->size() != 4) {
          Drop(JsonSnippet(item), "box arity");
          continue;
        }
        int c[4];
        bool ok = true;
        for (int k = 0; k < 4 && ok; ++k) {
          auto value = Coordinate((*box_it)[k]);
          if (!value || !std::isfinite(*value)) {
            Drop(JsonSnippet(item), "box coordinate not numeric");
            ok = false;
          } else if (*value < 0 || *value > BoundingBox::kScale) {
            Drop(JsonSnippet(item), "box range");
            ok = false;
          } else {
            c[k] = static_cast<int>(std::lround(*value));
          }
        }
        if (!ok) continue;
        BoundingBox box{c[0], c[1], c[2], c[3]};
        if (!box.IsValid()) {
          Drop(JsonSnippet(item), "box order");
          continue;
        }
        object.box = box;
      }

      if (auto attr_it = item.find("attributes");
          attr_it != item.end() && !attr_it->is_null()) {
        std::vector<json> attrs;
        if (attr_it->is_array()) {
          attrs.assign(attr_it->begin(), attr_it->end());
        } else {
          attrs.push_back(*attr_it);
        }
        for (const auto& a : attrs) {
          if (!a.is_string()) {
            Drop(JsonSnippet(a), "attribute not a string");
            continue;
          }
          const std::string term = vocab_.Canonicalize(a.get<std::string>());
          if (!vocab_.IsAttribute(term)) {
            Drop(a.get<std::string>(), "unknown attribute");
            continue;
          }
          object.attributes.insert(term);
        }
      }
      objects.push_back(std::move(object));
      explicit_identity.push_back(name.explicit_identity);
    }
    ResolveIdentities(objects, explicit_identity);

    std::set<ObjectRef> seen;
    for (auto& object : objects) {
      if (!seen.insert(object.ref()).second) {
        Drop(object.ref().ToString(), "duplicate identity");
        continue;
      }
      out_.graph.objects.push_back(std::move(object));
      ++out_.recovered;
    }
  }

  std::optional<Triplet> TripletFromParts(const std::string& subject,
                                          const std::string& predicate,
                                          const std::string& object,
                                          const std::string& fragment) {
    Triplet t;
    t.subject = ParseName(subject, vocab_).ref;
    t.object = ParseName(object, vocab_).ref;
    t.predicate = vocab_.Canonicalize(predicate);
    if (!vocab_.IsPredicate(t.predicate)) {
      Drop(fragment, "unknown predicate");
      return std::nullopt;
    }
    if (!vocab_.IsObject(t.subject.class_name) ||
        !vocab_.IsObject(t.object.class_name)) {
      Drop(fragment, "unknown object class");
      return std::nullopt;
    }
    return t;
  }

  void ExtractTriplets(const json& root) {
    auto it = root.find("triplets");
    if (it == root.end()) it = root.find("relations");
    if (it == root.end() || it->is_null()) return;
    if (it->is_string()) {
      auto triplets = ParseSuffixTriplets(it->get<std::string>(), vocab_,
                                          &out_.dropped);
      for (auto& t : triplets) {
        const std::string fragment = t.ToString();
        AddTriplet(std::move(t), fragment);
      }
      if (!objects_declared_) DeclareEndpoints();
      return;
    }
    if (!it->is_array()) {
      Drop(JsonSnippet(*it), "triplets not a list");
      return;
    }
    for (const auto& item : *it) {
      const std::string fragment = JsonSnippet(item);
      std::optional<Triplet> t;
      if (item.is_object()) {
        auto s = item.find("subject");
        auto p = item.find("predicate");
        auto o = item.find("object");
        if (s == item.end() || p == item.end() || o == item.end() ||
            !s->is_string() || !p->is_string() || !o->is_string()) {
          Drop(fragment, "triplet missing subject/predicate/object");
          continue;
        }
        t = TripletFromParts(s->get<std::string>(), p->get<std::string>(),
                             o->get<std::string>(), fragment);
      } else if (item.is_array() && item.size() == 3 && item[0].is_string() &&
                 item[1].is_string() && item[2].is_string()) {
        t = TripletFromParts(item[0].get<std::string>(),
                             item[1].get<std::string>(),
                             item[2].get<std::string>(), fragment);
      } else if (item.is_string()) {
        auto parsed = ParseSuffixTriplets(item.get<std::string>(), vocab_,
                                          &out_.dropped);
        for (auto& p : parsed) AddTriplet(std::move(p), fragment);
        continue;
      } else {
        Drop(fragment, "malformed triplet");
        continue;
      }
      if (t) AddTriplet(std::move(*t), fragment);
    }
    if (!objects_declared_) DeclareEndpoints();
  }

  void AddTriplet(Triplet t, const std::string& fragment) {
    if (objects_declared_ &&
        (!FindObject(out_.graph.objects, t.subject) ||
         !FindObject(out_.graph.objects, t.object))) {
      Drop(fragment, "dangling reference");
      return;
    }
    out_.graph.triplets.push_back(std::move(t));
    ++out_.recovered;
  }

  // Triplet-only outputs name their objects implicitly; declare them as
  // boxless instances so the graph is self-consistent.
  void DeclareEndpoints() {
    for (const auto& t : out_.graph.triplets) {
      for (const ObjectRef* end : {&t.subject, &t.object}) {
        if (!FindObject(out_.graph.objects, *end)) {
          ObjectInstance object;
          object.class_name = end->class_name;
          object.identity = end->identity;
          out_.graph.objects.push_back(std::move(object));
        }
      }
    }
  }

  const Vocabulary& vocab_;
  ParseOutcome& out_;
  bool objects_declared_ = false;
  bool graph_shaped_ = false;
};

PredictionFormat DetectFormat(std::string_view payload) {
  if (payload.find('{') != std::string_view::npos) {
    return PredictionFormat::kJsonGraph;
  }
  if (payload.find("<loc_") != std::string_view::npos) {
    return PredictionFormat::kLocDetection;
  }
  return PredictionFormat::kSuffixTriplets;
}

// Characters that separate detection runs or list items.
bool IsSeparator(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';' ||
         c == '.' || c == '|';
}

std::string_view TrimSeparators(std::string_view s) {
  while (!s.empty() && IsSeparator(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSeparator(s.back())) s.remove_suffix(1);
  return s;
}

// Reads "<loc_N>" at `pos`. Values that overflow are reported as -1.
std::optional<long long> ReadLocToken(std::string_view text, std::size_t& pos) {
  constexpr std::string_view kOpen = "<loc_";
  if (text.compare(pos, kOpen.size(), kOpen) != 0) return std::nullopt;
  std::size_t p = pos + kOpen.size();
  const std::size_t digits_begin = p;
  while (p < text.size() && std::isdigit(static_cast<unsigned char>(text[p]))) {
    ++p;
  }
  if (p == digits_begin || p >= text.size() || text[p] != '>') {
    return std::nullopt;
  }
  long long value = 0;
  const auto [end, ec] =
      std::from_chars(text.data() + digits_begin, text.data() + p, value);
  if (ec != std::errc() || end != text.data() + p) value = -1;
  pos = p + 1;
  return value;
}

std::vector<std::string> Tokenize(std::string_view clause) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : clause) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string Join(const std::vector<std::string>& tokens, std::size_t begin,
                 std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back('_');
    out += tokens[i];
  }
  return out;
}

// Strips list markers ("-", "*", "1.", "2)") and arrows from a clause.
std::string CleanClause(std::string_view clause) {
  clause = Trim(clause);
  if (!clause.empty() && (clause.front() == '-' || clause.front() == '*')) {
    clause.remove_prefix(1);
  } else {
    std::size_t i = 0;
    while (i < clause.size() && std::isdigit(static_cast<unsigned char>(clause[i]))) {
      ++i;
    }
    if (i > 0 && i < clause.size() && (clause[i] == '.' || clause[i] == ')')) {
      clause.remove_prefix(i + 1);
    }
  }
  std::string out;
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (clause.compare(i, 2, "->") == 0) {
      out.push_back(' ');
      ++i;
    } else if (clause.compare(i, 3, "\xE2\x86\x92") == 0) {  // U+2192
      out.push_back(' ');
      i += 2;
    } else {
      out.push_back(clause[i]);
    }
  }
  while (!out.empty() && (out.back() == '.' || std::isspace(static_cast<unsigned char>(out.back())))) {
    out.pop_back();
  }
  return out;
}

}  // namespace

std::string_view PredictionFormatName(PredictionFormat format) {
  switch (format) {
    case PredictionFormat::kAuto:
      return "auto";
    case PredictionFormat::kJsonGraph:
      return "json_graph";
    case PredictionFormat::kLocDetection:
      return "loc_detection";
    case PredictionFormat::kSuffixTriplets:
      return "suffix_triplets";
  }
  return "auto";
}

std::optional<PredictionFormat> PredictionFormatFromName(std::string_view name) {
  for (auto f : {PredictionFormat::kAuto, PredictionFormat::kJsonGraph,
                 PredictionFormat::kLocDetection,
                 PredictionFormat::kSuffixTriplets}) {
    if (PredictionFormatName(f) == name) return f;
  }
  return std::nullopt;
}

FrameRecord ParseGroundTruthLine(std::string_view line, const Vocabulary& vocab,
                                 std::size_t line_number) {
  const LineError err(line_number);
  json root;
  try {
    root = json::parse(line.begin(), line.end());
  } catch (const json::exception& e) {
    err.Fail("<line>", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) err.Fail("<line>", "expected a JSON object");

  FrameRecord frame;
  frame.frame_id = RequireString(root, "frame_id", err);
  for (const auto& raw : RequireStringArray(Require(root, "tags", err), "tags", err)) {
    const std::string tag = vocab.Canonicalize(raw);
    if (!vocab.IsTag(tag)) {
      err.Fail("tags", "tag '" + raw + "' is outside the taxonomy");
    }
    frame.tags.insert(tag);
  }
  frame.caption = RequireString(root, "caption", err);

  const json& objects = Require(root, "objects", err);
  if (!objects.is_array()) err.Fail("objects", "expected a list");
  std::vector<bool> explicit_identity;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const json& item = objects[i];
    const std::string field = "objects[" + std::to_string(i) + "]";
    if (!item.is_object()) err.Fail(field, "expected an object");
    const json& name = Require(item, "name", err);
    if (!name.is_string()) err.Fail(field + ".name", "expected a string");
    ParsedName parsed = ParseName(name.get<std::string>(), vocab);
    ObjectInstance object;
    object.class_name = parsed.ref.class_name;
    object.identity = parsed.ref.identity;
    object.box = StrictBox(Require(item, "box", err), field + ".box", err);
    for (const auto& a : RequireStringArray(Require(item, "attributes", err),
                                            field + ".attributes", err)) {
      object.attributes.insert(vocab.Canonicalize(a));
    }
    frame.objects.push_back(std::move(object));
    explicit_identity.push_back(parsed.explicit_identity);
  }
  ResolveIdentities(frame.objects, explicit_identity);
  std::set<ObjectRef> seen;
  for (const auto& object : frame.objects) {
    if (!seen.insert(object.ref()).second) {
      err.Fail("objects", "duplicate identity " + object.ref().ToString());
    }
  }

  const json& triplets = Require(root, "triplets", err);
  if (!triplets.is_array()) err.Fail("triplets", "expected a list");
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const json& item = triplets[i];
    const std::string field = "triplets[" + std::to_string(i) + "]";
    if (!item.is_object()) err.Fail(field, "expected an object");
    Triplet t;
    t.subject = ParseName(RequireString(item, "subject", err), vocab).ref;
    t.predicate = vocab.Canonicalize(RequireString(item, "predicate", err));
    t.object = ParseName(RequireString(item, "object", err), vocab).ref;
    frame.triplets.push_back(std::move(t));
  }

  if (auto it = root.find("split"); it != root.end() && !it->is_null()) {
    if (!it->is_string()) err.Fail("split", "expected a string");
    auto split = SplitFromName(FoldTerm(it->get<std::string>()));
    if (!split) err.Fail("split", "must be one of train, val, test");
    frame.split = split;
  }
  if (auto it = root.find("movie_id"); it != root.end() && !it->is_null()) {
    if (!it->is_string()) err.Fail("movie_id", "expected a string");
    frame.movie_id = it->get<std::string>();
  }
  if (auto it = root.find("unsafe"); it != root.end() && !it->is_null()) {
    if (!it->is_boolean()) err.Fail("unsafe", "expected a boolean");
    frame.unsafe = it->get<bool>();
  }
  return frame;
}

std::vector<FrameRecord> ParseGroundTruth(std::istream& in,
                                          const Vocabulary& vocab) {
  std::vector<FrameRecord> frames;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    frames.push_back(ParseGroundTruthLine(line, vocab, line_number));
  }
  return frames;
}

std::vector<FrameRecord> ParseGroundTruthFile(const std::filesystem::path& path,
                                              const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open ground-truth file: " + path.string());
  try {
    return ParseGroundTruth(in, vocab);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

ParseOutcome ParsePrediction(const RawPrediction& raw,
                             const Vocabulary& vocab) noexcept {
  ParseOutcome out;
  try {
    out.graph.frame_id = raw.frame_id;
    const std::string_view payload = Trim(raw.payload);
    if (payload.empty()) {
      out.dropped.push_back({"", "empty payload"});
      return out;
    }
    PredictionFormat format = raw.format_hint;
    if (format == PredictionFormat::kAuto) format = DetectFormat(payload);
    LenientParser parser(vocab, out);
    switch (format) {
      case PredictionFormat::kJsonGraph:
        parser.ParseJsonGraph(payload);
        break;
      case PredictionFormat::kLocDetection:
        parser.ParseLoc(payload);
        break;
      case PredictionFormat::kSuffixTriplets:
      case PredictionFormat::kAuto:
        parser.ParseTriplets(payload);
        break;
    }
    if (out.recovered == 0 && out.dropped.empty() && !parser.graph_shaped()) {
      out.dropped.push_back({Snippet(payload), "no recognizable content"});
    }
  } catch (const std::exception& e) {
    out.graph = FrameRecord{};
    out.graph.frame_id = raw.frame_id;
    out.recovered = 0;
    out.dropped.push_back({Snippet(raw.payload),
                           std::string("parser failure: ") + e.what()});
  } catch (...) {
    out.graph = FrameRecord{};
    out.graph.frame_id = raw.frame_id;
    out.recovered = 0;
    out.dropped.push_back({Snippet(raw.payload), "parser failure"});
  }
  return out;
}

std::vector<ObjectInstance> ParseLocDetection(
    std::string_view text, const Vocabulary& vocab,
    std::vector<DroppedFragment>* dropped) {
  auto drop = [&](std::string_view fragment, std::string reason) {
    if (dropped) dropped->push_back({Snippet(fragment), std::move(reason)});
  };
  std::vector<ObjectInstance> objects;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t loc = text.find("<loc_", pos);
    if (loc == std::string_view::npos) {
      const auto rest = TrimSeparators(text.substr(pos));
      if (!rest.empty()) drop(rest, "missing box");
      break;
    }
    std::size_t p = loc;
    std::vector<long long> values;
    while (auto v = ReadLocToken(text, p)) values.push_back(*v);
    if (values.empty()) {
      // "<loc_" that is not a well-formed token; skip past it.
      const std::size_t next = loc + 5;
      drop(TrimSeparators(text.substr(pos, next - pos)), "malformed loc token");
      pos = next;
      continue;
    }
    const std::string_view run = TrimSeparators(text.substr(pos, p - pos));
    const std::string_view raw_name = TrimSeparators(text.substr(pos, loc - pos));
    pos = p;

    std::vector<std::string> problems;
    if (values.size() % 4 != 0) problems.push_back("box arity");
    if (std::any_of(values.begin(), values.end(), [](long long v) {
          return v < 0 || v > BoundingBox::kScale;
        })) {
      problems.push_back("box range");
    }
    if (raw_name.empty()) problems.push_back("missing name");
    if (!problems.empty()) {
      std::string reason;
      for (const auto& problem : problems) {
        if (!reason.empty()) reason += " + ";
        reason += problem;
      }
      drop(run, reason);
      continue;
    }
    const std::string name = ParseName(raw_name, vocab).ref.class_name;
    if (!vocab.IsObject(name)) {
      drop(run, "unknown object class");
      continue;
    }
    for (std::size_t k = 0; k + 3 < values.size(); k += 4) {
      BoundingBox box{static_cast<int>(values[k]), static_cast<int>(values[k + 1]),
                      static_cast<int>(values[k + 2]),
                      static_cast<int>(values[k + 3])};
      if (!box.IsValid()) {
        drop(run, "box order");
        continue;
      }
      ObjectInstance object;
      object.class_name = name;
      object.box = box;
      objects.push_back(std::move(object));
    }
  }
  return AssignSuffixIds(std::move(objects));
}

std::vector<Triplet> ParseSuffixTriplets(std::string_view text,
                                         const Vocabulary& vocab,
                                         std::vector<DroppedFragment>* dropped) {
  auto drop = [&](std::string_view fragment, std::string reason) {
    if (dropped) dropped->push_back({Snippet(fragment), std::move(reason)});
  };
  std::vector<Triplet> triplets;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find_first_of("\n;", begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw_clause = Trim(text.substr(begin, end - begin));
    begin = end + 1;
    if (raw_clause.empty()) continue;

    const auto tokens = Tokenize(CleanClause(raw_clause));
    if (tokens.size() < 3) {
      drop(raw_clause, "malformed clause");
      continue;
    }
    // Multi-word terms are allowed; take the first split where both
    // endpoints are objects and the middle is a predicate.
    bool matched = false;
    for (std::size_t i = 1; i + 1 < tokens.size() && !matched; ++i) {
      for (std::size_t j = i + 1; j < tokens.size() && !matched; ++j) {
        Triplet t;
        t.subject = ParseName(Join(tokens, 0, i), vocab).ref;
        t.predicate = vocab.Canonicalize(Join(tokens, i, j));
        t.object = ParseName(Join(tokens, j, tokens.size()), vocab).ref;
        if (vocab.IsObject(t.subject.class_name) &&
            vocab.IsObject(t.object.class_name) &&
            vocab.IsPredicate(t.predicate)) {
          triplets.push_back(std::move(t));
          matched = true;
        }
      }
    }
    if (matched) continue;
    const auto subject = ParseName(tokens.front(), vocab).ref;
    const auto object = ParseName(tokens.back(), vocab).ref;
    if (vocab.IsObject(subject.class_name) && vocab.IsObject(object.class_name)) {
      drop(raw_clause, "unknown predicate");
    } else {
      drop(raw_clause, "unknown object class");
    }
  }
  return triplets;
}

json GraphToJson(const FrameRecord& frame) {
  json root = json::object();
  root["frame_id"] = frame.frame_id;
  root["tags"] = json::array();
  for (const auto& tag : frame.tags) root["tags"].push_back(tag);
  root["caption"] = frame.caption;
  root["objects"] = json::array();
  for (const auto& object : frame.objects) {
    json o = json::object();
    o["name"] = object.ref().ToString();
    if (object.box) {
      o["box"] = {object.box->y_min, object.box->x_min, object.box->y_max,
                  object.box->x_max};
    } else {
      o["box"] = nullptr;
    }
    o["attributes"] = json::array();
    for (const auto& a : object.attributes) o["attributes"].push_back(a);
    root["objects"].push_back(std::move(o));
  }
  root["triplets"] = json::array();
  for (const auto& t : frame.triplets) {
    root["triplets"].push_back({{"subject", t.subject.ToString()},
                                {"predicate", t.predicate},
                                {"object", t.object.ToString()}});
  }
  if (frame.split) root["split"] = std::string(SplitName(*frame.split));
  if (frame.movie_id) root["movie_id"] = *frame.movie_id;
  if (frame.unsafe) root["unsafe"] = *frame.unsafe;
  return root;
}

std::string SerializeGraph(const FrameRecord& frame, const Vocabulary& vocab) {
  const ValidationReport report = ValidateGraph(frame, vocab);
  if (!report.clean()) {
    throw InputError("cannot serialize frame '" + frame.frame_id +
                     "': not clean\n" + report.Summary());
  }
  for (const auto& object : frame.objects) {
    if (!object.box) {
      throw InputError("cannot serialize frame '" + frame.frame_id +
                       "': object " + object.ref().ToString() + " has no box");
    }
  }
  return GraphToJson(frame).dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace sgmod
