// Copyright 2026 The Casewall Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "casewall/workspace.hpp"

#include <algorithm>
#include <cmath>

#include "casewall/hashing.hpp"

namespace casewall {

using json = nlohmann::json;

namespace {

bool has_content(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return !(c == ' ' || c == '\t' || c == '\n' || c == '\r'); });
}

bool finite(double v) { return std::isfinite(v); }

template <typename T, typename Id>
auto find_by(std::vector<T>& items, std::string_view id, Id T::*member) {
  return std::find_if(items.begin(), items.end(), [&](const T& t) { return t.*member == id; });
}

std::string make_id(std::string_view prefix, Seq seq) { return std::string(prefix) + "-" + std::to_string(seq); }

/// Applies one payload. Each handler validates everything before its first
/// write so that a rejection leaves the state exactly as it was.
class Reducer {
 public:
  Reducer(WorkspaceState& s, const Operation& op, const ReducerContext& ctx)
      : s_(s), op_(op), ctx_(ctx), seq_(*op.seq) {}

  ApplyResult run() {
    std::visit([this](const auto& p) { handle(p); }, op_.payload);
    if (result_.accepted()) s_.applied_seq = seq_;
    return std::move(result_);
  }

 private:
  void reject(std::string reason) { result_.rejection = Rejection{op_.op_id, std::move(reason)}; }

  bool may_edit(Role author) const { return ctx_.allow_cross_author_edit || author == op_.actor; }

  void record_mentions(std::string_view text, Channel channel, const std::string& artifact_id) {
    auto mentions = MentionExtractor(s_.registry, ctx_.extractor).extract(text);
    for (auto& m : mentions) {
      std::string id = m.entity_id;
      if (m.candidate_new) id = register_entity(s_.registry, m.new_name, EntityOrigin::Heuristic).entity_id;
      if (std::find(s_.mention_order.begin(), s_.mention_order.end(), id) == s_.mention_order.end())
        s_.mention_order.push_back(id);
      result_.mentions.push_back({id, channel, artifact_id, m.span, std::move(m.surface)});
    }
    if (channel == Channel::Hypothesis && !mentions.empty()) s_.last_hypothesis_mention = result_.mentions.back().entity_id;
  }

  Sticky* sticky(std::string_view id) {
    auto it = find_by(s_.stickies, id, &Sticky::sticky_id);
    return it == s_.stickies.end() ? nullptr : &*it;
  }
  HypothesisEntry* hypothesis(std::string_view id) {
    auto it = find_by(s_.hypotheses, id, &HypothesisEntry::hypothesis_id);
    return it == s_.hypotheses.end() ? nullptr : &*it;
  }
  bool document_exists(const std::string& doc_id) const {
    return ctx_.corpus != nullptr && ctx_.corpus->find_document(doc_id) != nullptr;
  }

  void handle(const op::CreateSticky& p) {
    if (!has_content(p.text)) return reject("empty text");
    if (!finite(p.x) || !finite(p.y)) return reject("non-finite position");
    auto id = make_id("s", seq_);
    s_.stickies.push_back({id, op_.actor, p.text, p.x, p.y, std::nullopt, std::nullopt});
    record_mentions(p.text, Channel::Sticky, id);
  }

  void handle(const op::EditSticky& p) {
    Sticky* st = sticky(p.sticky_id);
    if (!st) return reject("unknown sticky");
    if (!may_edit(st->author)) return reject("sticky belongs to the other analyst");
    if (!has_content(p.text)) return reject("empty text");
    st->text = p.text;
    record_mentions(p.text, Channel::Sticky, p.sticky_id);
  }

  void handle(const op::MoveSticky& p) {
    Sticky* st = sticky(p.sticky_id);
    if (!st) return reject("unknown sticky");
    if (!finite(p.x) || !finite(p.y)) return reject("non-finite position");
    st->x = p.x;
    st->y = p.y;
  }

  void handle(const op::LinkStickies& p) {
    if (!sticky(p.from) || !sticky(p.to)) return reject("unknown sticky");
    if (p.from == p.to) return reject("self link");
    const bool exists = std::any_of(s_.links.begin(), s_.links.end(), [&](const StickyLink& l) {
      return (l.from == p.from && l.to == p.to) || (l.from == p.to && l.to == p.from);
    });
    if (exists) return reject("stickies already linked");
    s_.links.push_back({make_id("l", seq_), p.from, p.to, op_.actor});
  }

  void handle(const op::PileStickies& p) {
    if (p.sticky_ids.empty()) return reject("no stickies to pile");
    for (const auto& id : p.sticky_ids) {
      if (!sticky(id)) return reject("unknown sticky");
    }
    for (const auto& id : p.sticky_ids) {
      sticky(id)->pile_id = p.pile_id.empty() ? std::nullopt : std::optional<std::string>(p.pile_id);
    }
  }

  void handle(const op::DeleteSticky& p) {
    auto it = find_by(s_.stickies, p.sticky_id, &Sticky::sticky_id);
    if (it == s_.stickies.end()) return reject("unknown sticky");
    if (!may_edit(it->author)) return reject("sticky belongs to the other analyst");
    s_.stickies.erase(it);
    std::erase_if(s_.links, [&](const StickyLink& l) { return l.from == p.sticky_id || l.to == p.sticky_id; });
  }

  void handle(const op::PostChat& p) {
    if (!has_content(p.text)) return reject("empty text");
    auto id = make_id("m", seq_);
    s_.chat.push_back({id, op_.actor, p.text, seq_});
    record_mentions(p.text, Channel::Chat, id);
  }

  void handle(const op::CreateAnnotation& p) {
    const Document* doc = ctx_.corpus ? ctx_.corpus->find_document(p.doc_id) : nullptr;
    if (!doc) return reject("unknown document");
    if (!role_can_read(doc->assigned_role, op_.actor)) return reject("document not assigned to this analyst");
    if (p.start >= p.end || p.end > doc->body.size()) return reject("span out of range");

    auto annotation_id = make_id("a", seq_);
    auto sticky_id = make_id("s", seq_);
    const auto quote = std::string_view(doc->body).substr(p.start, p.end - p.start);
    auto text = annotation_sticky_text(p.note, quote);
    const double y = ctx_.spawn.y0 + ctx_.spawn.dy * static_cast<double>(s_.spawned_stickies);

    s_.annotations.push_back({annotation_id, op_.actor, p.doc_id, {p.start, p.end}, p.note});
    s_.stickies.push_back({sticky_id, op_.actor, text, ctx_.spawn.x, y, annotation_id, std::nullopt});
    ++s_.spawned_stickies;
    record_mentions(text, Channel::Sticky, sticky_id);
  }

  void handle(const op::CreateHypothesis& p) {
    if (!has_content(p.text)) return reject("empty text");
    HypothesisEntry h;
    h.hypothesis_id = make_id("hyp", seq_);
    h.author = op_.actor;
    h.text = p.text;
    h.text_author = op_.actor;
    s_.hypotheses.push_back(std::move(h));
    record_mentions(p.text, Channel::Hypothesis, s_.hypotheses.back().hypothesis_id);
  }

  void handle(const op::EditHypothesisText& p) {
    HypothesisEntry* h = hypothesis(p.hypothesis_id);
    if (!h) return reject("unknown hypothesis");
    if (!has_content(p.text)) return reject("empty text");
    h->text = p.text;
    h->text_author = op_.actor;
    record_mentions(p.text, Channel::Hypothesis, p.hypothesis_id);
  }

  void add_evidence(const std::string& hypothesis_id, const std::string& text, bool confirming) {
    HypothesisEntry* h = hypothesis(hypothesis_id);
    if (!h) return reject("unknown hypothesis");
    if (!has_content(text)) return reject("empty text");
    auto& list = confirming ? h->confirming : h->disconfirming;
    list.push_back({make_id("ev", seq_), op_.actor, text});
    record_mentions(text, Channel::Hypothesis, hypothesis_id);
  }
  void handle(const op::AddConfirming& p) { add_evidence(p.hypothesis_id, p.text, true); }
  void handle(const op::AddDisconfirming& p) { add_evidence(p.hypothesis_id, p.text, false); }

  void handle(const op::SetHypothesisStatus& p) {
    HypothesisEntry* h = hypothesis(p.hypothesis_id);
    if (!h) return reject("unknown hypothesis");
    h->status = p.status;
    h->status_author = op_.actor;
  }

  void handle(const op::SetStatusComment& p) {
    HypothesisEntry* h = hypothesis(p.hypothesis_id);
    if (!h) return reject("unknown hypothesis");
    h->status_comment = p.text;
    h->comment_author = op_.actor;
    if (has_content(p.text)) record_mentions(p.text, Channel::Hypothesis, p.hypothesis_id);
  }

  void handle(const op::AddMapMarker& p) {
    if (!has_content(p.label)) return reject("empty label");
    if (!finite(p.x) || !finite(p.y)) return reject("non-finite position");
    if (!p.doc_id.empty() && !document_exists(p.doc_id)) return reject("unknown document");
    s_.markers.push_back({make_id("mk", seq_), op_.actor, p.label, p.x, p.y,
                          p.doc_id.empty() ? std::nullopt : std::optional<std::string>(p.doc_id)});
  }

  void handle(const op::AddTimelineEvent& p) {
    if (!has_content(p.label)) return reject("empty label");
    if (!finite(p.timestamp)) return reject("non-finite timestamp");
    if (!p.doc_id.empty() && !document_exists(p.doc_id)) return reject("unknown document");
    s_.timeline.push_back({make_id("te", seq_), op_.actor, p.label, p.timestamp,
                           p.doc_id.empty() ? std::nullopt : std::optional<std::string>(p.doc_id)});
  }

  WorkspaceState& s_;
  const Operation& op_;
  const ReducerContext& ctx_;
  Seq seq_;
  ApplyResult result_;
};

// --- serialization helpers ----------------------------------------------------

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<Role>& v) { return v ? json(std::string(to_string(*v))) : json(nullptr); }
std::string role_text(Role r) { return std::string(to_string(r)); }

Role role_of(const json& j) {
  auto r = parse_role(j.get<std::string>());
  if (!r) throw Error("unknown role in snapshot");
  return *r;
}
std::optional<std::string> opt_string(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<std::string>(j.get<std::string>());
}
std::optional<Role> opt_role(const json& j) {
  return j.is_null() ? std::nullopt : std::optional<Role>(role_of(j));
}

json evidence_json(const std::vector<Evidence>& list) {
  json out = json::array();
  for (const auto& e : list) out.push_back({{"evidence_id", e.evidence_id}, {"author", role_text(e.author)}, {"text", e.text}});
  return out;
}
std::vector<Evidence> evidence_from(const json& j) {
  std::vector<Evidence> out;
  for (const auto& e : j) out.push_back({e.at("evidence_id").get<std::string>(), role_of(e.at("author")), e.at("text").get<std::string>()});
  return out;
}

}  // namespace

WorkspaceState WorkspaceState::initial(const Corpus& corpus) {
  WorkspaceState s;
  s.registry = EntityRegistry::from_gazetteer(corpus.manifest().gazetteer);
  return s;
}

const Sticky* WorkspaceState::find_sticky(std::string_view id) const {
  auto it = std::find_if(stickies.begin(), stickies.end(), [&](const Sticky& s) { return s.sticky_id == id; });
  return it == stickies.end() ? nullptr : &*it;
}

const HypothesisEntry* WorkspaceState::find_hypothesis(std::string_view id) const {
  auto it = std::find_if(hypotheses.begin(), hypotheses.end(),
                         [&](const HypothesisEntry& h) { return h.hypothesis_id == id; });
  return it == hypotheses.end() ? nullptr : &*it;
}

SequenceError::SequenceError(Seq expected, std::optional<Seq> got)
    : Error(got ? "out-of-order operation: expected seq " + std::to_string(expected) + ", got " + std::to_string(*got)
                : "operation has no seq; expected " + std::to_string(expected)),
      expected_(expected) {}

ApplyResult apply_in_place(WorkspaceState& state, const Operation& op, const ReducerContext& ctx) {
  const Seq expected = state.applied_seq + 1;
  if (!op.seq || *op.seq != expected) throw SequenceError(expected, op.seq);
  return Reducer(state, op, ctx).run();
}

ApplyOutcome apply(const WorkspaceState& state, const Operation& op, const ReducerContext& ctx) {
  ApplyOutcome out{state, {}};
  out.result = apply_in_place(out.state, op, ctx);
  return out;
}

std::string annotation_sticky_text(std::string_view note, std::string_view quote) {
  std::string out;
  if (has_content(note)) {
    out += note;
    out += ' ';
  }
  out += '"';
  out += quote;
  out += '"';
  return out;
}

std::vector<SharedText> shared_texts(const WorkspaceState& state) {
  std::vector<SharedText> out;
  for (const auto& s : state.stickies) out.push_back({Channel::Sticky, s.sticky_id, "text", s.text});
  for (const auto& m : state.chat) out.push_back({Channel::Chat, m.message_id, "text", m.text});
  for (const auto& h : state.hypotheses) {
    out.push_back({Channel::Hypothesis, h.hypothesis_id, "text", h.text});
    for (const auto& e : h.confirming)
      out.push_back({Channel::Hypothesis, h.hypothesis_id, "confirming:" + e.evidence_id, e.text});
    for (const auto& e : h.disconfirming)
      out.push_back({Channel::Hypothesis, h.hypothesis_id, "disconfirming:" + e.evidence_id, e.text});
    if (has_content(h.status_comment)) out.push_back({Channel::Hypothesis, h.hypothesis_id, "comment", h.status_comment});
  }
  return out;
}

std::vector<std::string> shared_text_strings(const WorkspaceState& state) {
  std::vector<std::string> out;
  for (auto& t : shared_texts(state)) out.push_back(std::move(t.text));
  return out;
}

json state_to_json(const WorkspaceState& s) {
  json j;
  j["applied_seq"] = s.applied_seq;
  j["spawned_stickies"] = s.spawned_stickies;
  j["last_hypothesis_mention"] = opt(s.last_hypothesis_mention);
  j["mention_order"] = s.mention_order;

  json stickies = json::array();
  for (const auto& x : s.stickies) {
    stickies.push_back({{"sticky_id", x.sticky_id}, {"author", role_text(x.author)}, {"text", x.text}, {"x", x.x},
                        {"y", x.y}, {"source_annotation_id", opt(x.source_annotation_id)}, {"pile_id", opt(x.pile_id)}});
  }
  j["stickies"] = std::move(stickies);

  json links = json::array();
  for (const auto& l : s.links)
    links.push_back({{"link_id", l.link_id}, {"from", l.from}, {"to", l.to}, {"author", role_text(l.author)}});
  j["links"] = std::move(links);

  json annotations = json::array();
  for (const auto& a : s.annotations) {
    annotations.push_back({{"annotation_id", a.annotation_id}, {"author", role_text(a.author)}, {"doc_id", a.doc_id},
                           {"start", a.span.begin}, {"end", a.span.end}, {"note", a.note}});
  }
  j["annotations"] = std::move(annotations);

  json chat = json::array();
  for (const auto& m : s.chat)
    chat.push_back({{"message_id", m.message_id}, {"author", role_text(m.author)}, {"text", m.text}, {"seq", m.seq}});
  j["chat"] = std::move(chat);

  json hypotheses = json::array();
  for (const auto& h : s.hypotheses) {
    hypotheses.push_back({{"hypothesis_id", h.hypothesis_id},
                          {"author", role_text(h.author)},
                          {"text", h.text},
                          {"text_author", role_text(h.text_author)},
                          {"confirming", evidence_json(h.confirming)},
                          {"disconfirming", evidence_json(h.disconfirming)},
                          {"status", std::string(to_string(h.status))},
                          {"status_author", opt(h.status_author)},
                          {"status_comment", h.status_comment},
                          {"comment_author", opt(h.comment_author)}});
  }
  j["hypotheses"] = std::move(hypotheses);

  json markers = json::array();
  for (const auto& m : s.markers) {
    markers.push_back({{"marker_id", m.marker_id}, {"author", role_text(m.author)}, {"label", m.label}, {"x", m.x},
                       {"y", m.y}, {"doc_id", opt(m.doc_id)}});
  }
  j["markers"] = std::move(markers);

  json timeline = json::array();
  for (const auto& e : s.timeline) {
    timeline.push_back({{"event_id", e.event_id}, {"author", role_text(e.author)}, {"label", e.label},
                        {"timestamp", e.timestamp}, {"doc_id", opt(e.doc_id)}});
  }
  j["timeline"] = std::move(timeline);

  json registry = json::array();
  for (const auto& p : s.registry.entities()) {
    registry.push_back({{"entity_id", p.entity_id}, {"canonical_name", p.canonical_name}, {"aliases", p.aliases},
                        {"origin", std::string(to_string(p.origin))}});
  }
  j["registry"] = std::move(registry);
  return j;
}

WorkspaceState state_from_json(const json& j) {
  try {
    WorkspaceState s;
    s.applied_seq = j.at("applied_seq").get<Seq>();
    s.spawned_stickies = j.at("spawned_stickies").get<std::size_t>();
    s.last_hypothesis_mention = opt_string(j.at("last_hypothesis_mention"));
    s.mention_order = j.at("mention_order").get<std::vector<std::string>>();
    for (const auto& x : j.at("stickies")) {
      s.stickies.push_back({x.at("sticky_id").get<std::string>(), role_of(x.at("author")), x.at("text").get<std::string>(),
                            x.at("x").get<double>(), x.at("y").get<double>(), opt_string(x.at("source_annotation_id")),
                            opt_string(x.at("pile_id"))});
    }
    for (const auto& l : j.at("links")) {
      s.links.push_back({l.at("link_id").get<std::string>(), l.at("from").get<std::string>(),
                         l.at("to").get<std::string>(), role_of(l.at("author"))});
    }
    for (const auto& a : j.at("annotations")) {
      s.annotations.push_back({a.at("annotation_id").get<std::string>(), role_of(a.at("author")),
                               a.at("doc_id").get<std::string>(),
                               {a.at("start").get<std::size_t>(), a.at("end").get<std::size_t>()},
                               a.at("note").get<std::string>()});
    }
    for (const auto& m : j.at("chat")) {
      s.chat.push_back({m.at("message_id").get<std::string>(), role_of(m.at("author")), m.at("text").get<std::string>(),
                        m.at("seq").get<Seq>()});
    }
    for (const auto& h : j.at("hypotheses")) {
      HypothesisEntry e;
      e.hypothesis_id = h.at("hypothesis_id").get<std::string>();
      e.author = role_of(h.at("author"));
      e.text = h.at("text").get<std::string>();
      e.text_author = role_of(h.at("text_author"));
      e.confirming = evidence_from(h.at("confirming"));
      e.disconfirming = evidence_from(h.at("disconfirming"));
      auto status = parse_status(h.at("status").get<std::string>());
      if (!status) throw Error("unknown hypothesis status in snapshot");
      e.status = *status;
      e.status_author = opt_role(h.at("status_author"));
      e.status_comment = h.at("status_comment").get<std::string>();
      e.comment_author = opt_role(h.at("comment_author"));
      s.hypotheses.push_back(std::move(e));
    }
    for (const auto& m : j.at("markers")) {
      s.markers.push_back({m.at("marker_id").get<std::string>(), role_of(m.at("author")), m.at("label").get<std::string>(),
                           m.at("x").get<double>(), m.at("y").get<double>(), opt_string(m.at("doc_id"))});
    }
    for (const auto& e : j.at("timeline")) {
      s.timeline.push_back({e.at("event_id").get<std::string>(), role_of(e.at("author")), e.at("label").get<std::string>(),
                            e.at("timestamp").get<double>(), opt_string(e.at("doc_id"))});
    }
    for (const auto& p : j.at("registry")) {
      auto origin = parse_origin(p.at("origin").get<std::string>());
      if (!origin) throw Error("unknown entity origin in snapshot");
      s.registry.add({p.at("entity_id").get<std::string>(), p.at("canonical_name").get<std::string>(),
                      p.at("aliases").get<std::vector<std::string>>(), *origin});
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed workspace snapshot: ") + e.what());
  }
}

std::string snapshot_text(const WorkspaceState& state) { return state_to_json(state).dump(); }

std::string state_hash(const WorkspaceState& state) { return sha256_hex(snapshot_text(state)); }

}  // namespace casewall
