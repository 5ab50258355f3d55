#include "chorm/typealg.hpp"

#include <algorithm>
#include <tuple>

#include "chorm/ast_ops.hpp"
#include "chorm/printer.hpp"

namespace chorm {

// ------------------------------------------------------------ path events ----

std::string path_event_text(const PathEvent& e) {
    return std::visit(
        overload{
            [](const PCom& c) {
                return c.from.value + " -> " + c.to.value + " : <" + sort_name(c.sort) + ">";
            },
            [](const PSel& s) { return s.from.value + " -> " + s.to.value + " : " + s.label.value; },
        },
        e);
}

std::string word_text(const Word& w) {
    std::string out = "[";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out += ", ";
        out += path_event_text(w[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------- path automaton ----

namespace {

struct AutomatonBuilder {
    PathAutomaton a{};
    std::map<std::string, int> ids{};
    std::vector<TypePtr> pending{};

    int state_of(const TypePtr& g) {
        TypePtr h = unfold_head(g);
        std::string key = pretty(alpha_canonical_type(h));
        auto [it, fresh] = ids.emplace(std::move(key), (int)a.edges.size());
        if (fresh) {
            a.edges.emplace_back();
            pending.push_back(h);
        }
        return it->second;
    }
};

} // namespace

PathAutomaton paths_automaton(const TypePtr& g) {
    AutomatonBuilder b;
    b.a.initial = b.state_of(g);
    for (size_t next = 0; next < b.pending.size(); ++next) {
        TypePtr h = b.pending[next]; // already head-unfolded
        int id = (int)next;
        std::visit(
            overload{
                [&](const ComType& t) {
                    // state_of may grow (and reallocate) the edge table, so
                    // resolve the target before touching edges[id].
                    int target = b.state_of(t.cont);
                    b.a.edges[id].push_back({PCom{t.from, t.to, t.sort}, target});
                },
                [&](const ChoiceType& t) {
                    for (const auto& [l, cont] : t.branches) {
                        int target = b.state_of(cont);
                        b.a.edges[id].push_back({PSel{t.from, t.to, l}, target});
                    }
                },
                [&](const EndType&) {},
                [&](const RecType&) {},  // unreachable after unfold_head
                [&](const TypeVar&) {},  // unreachable for closed types
            },
            h->node);
    }
    return b.a;
}

namespace {

void collect_paths(const PathAutomaton& a, int state, Word& word, int depth, PathSet& out) {
    out.all.insert(word);
    if (a.edges[state].empty() || (int)word.size() == depth) {
        out.maximal.insert(word);
        if ((int)word.size() == depth) return;
    }
    if ((int)word.size() == depth) return;
    for (const auto& [ev, next] : a.edges[state]) {
        word.push_back(ev);
        collect_paths(a, next, word, depth, out);
        word.pop_back();
    }
}

} // namespace

PathSet enumerate_paths(const PathAutomaton& a, int depth) {
    PathSet out;
    Word w;
    collect_paths(a, a.initial, w, depth, out);
    return out;
}

// --------------------------------------------------------- type extraction ----

namespace {

struct ExtractFail {
    ExtractError e;
};

struct Extractor {
    std::optional<SessChan> session{};

    void note(const SessChan& k, const std::string& path) {
        if (!session)
            session = k;
        else if (*session != k)
            throw ExtractFail{{path, "multi-session: interactions use both " + session->value + " and " +
                                         k.value}};
    }

    static const SelEta* sel_head(const ChorPtr& c) {
        if (auto* s = std::get_if<SeqNode>(&c->node)) return std::get_if<SelEta>(&s->head);
        return nullptr;
    }

    static std::string join(const std::string& a, const std::string& b) {
        return a.empty() ? b : a + " > " + b;
    }

    TypePtr walk(const ChorPtr& c, SortEnv& sorts, const std::string& path) {
        return std::visit(
            overload{
                [&](const SeqNode& n) -> TypePtr {
                    return std::visit(
                        overload{
                            [&](const StartEta& s) -> TypePtr {
                                throw ExtractFail{{join(path, "start " + s.chan.value),
                                                   "unexpected start: only a single leading start is allowed"}};
                            },
                            [&](const ComEta& m) -> TypePtr {
                                std::string here = join(path, "com " + m.sender.thread.value + "->" +
                                                                  m.receiver.thread.value);
                                note(m.session, here);
                                auto s = sort_of(m.expr, sorts, m.sender.thread);
                                if (!s.ok())
                                    throw ExtractFail{{here, "unsortable expression: " + s.error().message}};
                                sorts.vars[{m.receiver.thread, m.bind_var}] = s.value();
                                return tcom(m.sender.role, m.receiver.role, s.value(),
                                            walk(n.cont, sorts, path));
                            },
                            [&](const SelEta& s) -> TypePtr {
                                std::string here =
                                    join(path, "sel " + s.from.thread.value + "->" + s.to.thread.value);
                                note(s.session, here);
                                std::map<Label, TypePtr> branches;
                                branches.emplace(s.label, walk(n.cont, sorts, path));
                                return tchoice(s.from.role, s.to.role, std::move(branches));
                            },
                        },
                        n.head);
                },
                [&](const CondNode& n) -> TypePtr {
                    std::string here = join(path, "if @" + n.at.value);
                    const SelEta* s1 = sel_head(n.then_branch);
                    const SelEta* s2 = sel_head(n.else_branch);
                    if (s1 && s2 && s1->from.role == s2->from.role && s1->to.role == s2->to.role &&
                        s1->label != s2->label) {
                        note(s1->session, here);
                        note(s2->session, here);
                        SortEnv e1 = sorts, e2 = sorts;
                        const auto& c1 = std::get<SeqNode>(n.then_branch->node).cont;
                        const auto& c2 = std::get<SeqNode>(n.else_branch->node).cont;
                        std::map<Label, TypePtr> branches;
                        branches.emplace(s1->label, walk(c1, e1, join(here, "then")));
                        branches.emplace(s2->label, walk(c2, e2, join(here, "else")));
                        return tchoice(s1->from.role, s1->to.role, std::move(branches));
                    }
                    SortEnv e1 = sorts, e2 = sorts;
                    TypePtr g1 = walk(n.then_branch, e1, join(here, "then"));
                    TypePtr g2 = walk(n.else_branch, e2, join(here, "else"));
                    if (alpha_equal_type(g1, g2)) return g1;
                    throw ExtractFail{{here, "unmergeable conditional: branches neither offer distinct "
                                             "sibling selections nor extract to the same type"}};
                },
                [&](const RecNode& n) -> TypePtr {
                    return trec(TypeRecVar{n.var.value}, walk(n.body, sorts, join(path, "rec " + n.var.value)));
                },
                [&](const CallNode& n) -> TypePtr { return tvar(TypeRecVar{n.var.value}); },
                [&](const ResNode& n) -> TypePtr { return walk(n.body, sorts, path); },
                [&](const InactNode&) -> TypePtr { return tend(); },
            },
            c->node);
    }
};

} // namespace

Result<TypePtr, ExtractError> extract_type(const ChorPtr& c, const SortEnv& sorts0) {
    Extractor ex;
    ChorPtr body = c;
    if (auto* s = std::get_if<SeqNode>(&c->node)) {
        if (auto* st = std::get_if<StartEta>(&s->head)) {
            ex.session = st->session;
            body = s->cont;
        }
    }
    SortEnv sorts = sorts0;
    try {
        TypePtr g = ex.walk(body, sorts, "");
        if (!type_closed(g)) return ExtractError{"", "extraction produced an unbound type variable"};
        if (!type_contractive(g)) return ExtractError{"", "extraction produced a non-contractive type"};
        return g;
    } catch (ExtractFail& f) {
        return f.e;
    }
}

// ------------------------------------------------------------ shuffle/mesh ----

namespace {

// A component family: base words of one original under one role cast.
struct Spec {
    int original_index = -1;
    std::map<RoleName, RoleName> renaming;
    std::vector<Word> words;
};

Word rename_word(const Word& w, const std::map<RoleName, RoleName>& sigma) {
    auto ren = [&](const RoleName& r) {
        auto it = sigma.find(r);
        return it == sigma.end() ? r : it->second;
    };
    Word out;
    out.reserve(w.size());
    for (const auto& e : w)
        out.push_back(std::visit(overload{
                                     [&](const PCom& c) -> PathEvent { return PCom{ren(c.from), ren(c.to), c.sort}; },
                                     [&](const PSel& s) -> PathEvent { return PSel{ren(s.from), ren(s.to), s.label}; },
                                 },
                                 e));
    return out;
}

void injections_rec(const std::vector<RoleName>& dom, size_t i, const std::vector<RoleName>& codom,
                    std::vector<bool>& used, std::map<RoleName, RoleName>& cur,
                    std::vector<std::map<RoleName, RoleName>>& out) {
    if (i == dom.size()) {
        out.push_back(cur);
        return;
    }
    for (size_t j = 0; j < codom.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        cur[dom[i]] = codom[j];
        injections_rec(dom, i + 1, codom, used, cur, out);
        cur.erase(dom[i]);
        used[j] = false;
    }
}

std::vector<std::map<RoleName, RoleName>> injections(const std::vector<RoleName>& dom,
                                                     const std::vector<RoleName>& codom) {
    std::vector<std::map<RoleName, RoleName>> out;
    if (dom.size() > codom.size()) return out;
    std::vector<bool> used(codom.size(), false);
    std::map<RoleName, RoleName> cur;
    injections_rec(dom, 0, codom, used, cur, out);
    return out;
}

// Memoized interleaving search. A component is either at a word boundary or
// somewhere inside its current word; the word picks within one component
// may differ between repetitions, but the component's spec (and so its role
// cast) is fixed at creation.
struct Decomposer {
    const Word& p;
    const std::vector<Spec>& specs;
    int m_bound;

    struct Comp {
        int spec;
        std::vector<int> word_seq{};
        int cur_word = -1; // -1: at a boundary
        size_t off = 0;
    };
    std::vector<Comp> comps{};
    std::vector<int> coloring{};
    std::set<std::pair<size_t, std::string>> failed{};

    std::string canon() const {
        std::vector<std::tuple<int, int, size_t>> v;
        v.reserve(comps.size());
        for (const auto& c : comps) v.emplace_back(c.spec, c.cur_word, c.off);
        std::sort(v.begin(), v.end());
        std::string s;
        for (auto& [a, b, c] : v)
            s += std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c) + ";";
        return s;
    }

    bool try_extend(size_t pos, size_t j, int word_idx) {
        Comp saved = comps[j];
        const Word& w = specs[comps[j].spec].words[word_idx];
        if (comps[j].cur_word < 0) { // starting a fresh repetition
            comps[j].word_seq.push_back(word_idx);
            if (w.size() == 1) {
                comps[j].cur_word = -1;
                comps[j].off = 0;
            } else {
                comps[j].cur_word = word_idx;
                comps[j].off = 1;
            }
        } else { // continuing the current word
            ++comps[j].off;
            if (comps[j].off == w.size()) {
                comps[j].cur_word = -1;
                comps[j].off = 0;
            }
        }
        coloring.push_back((int)j);
        if (search(pos + 1)) return true;
        coloring.pop_back();
        comps[j] = std::move(saved);
        return false;
    }

    bool search(size_t pos) {
        if (pos == p.size()) {
            for (const auto& c : comps)
                if (c.cur_word >= 0) return false; // repetition cut mid-word
            return true;
        }
        auto key = std::make_pair(pos, canon());
        if (failed.count(key)) return false;
        const PathEvent& e = p[pos];
        for (size_t j = 0; j < comps.size(); ++j) {
            if (comps[j].cur_word >= 0) {
                const Word& w = specs[comps[j].spec].words[comps[j].cur_word];
                if (w[comps[j].off] == e && try_extend(pos, j, comps[j].cur_word)) return true;
            } else {
                const auto& words = specs[comps[j].spec].words;
                for (size_t wi = 0; wi < words.size(); ++wi)
                    if (words[wi][0] == e && try_extend(pos, j, (int)wi)) return true;
            }
        }
        if ((int)comps.size() < m_bound) {
            for (size_t si = 0; si < specs.size(); ++si) {
                const auto& words = specs[si].words;
                for (size_t wi = 0; wi < words.size(); ++wi) {
                    if (words[wi][0] != e) continue;
                    comps.push_back(Comp{(int)si});
                    size_t j = comps.size() - 1;
                    if (try_extend(pos, j, (int)wi)) return true;
                    comps.pop_back();
                }
            }
        }
        failed.insert(std::move(key));
        return false;
    }
};

std::optional<ShuffleWitness> decompose_with_specs(const Word& p, const std::vector<Spec>& specs,
                                                   int m_bound) {
    Decomposer d{p, specs, m_bound};
    if (!d.search(0)) return std::nullopt;
    ShuffleWitness wit;
    wit.coloring = std::move(d.coloring);
    for (const auto& c : d.comps) {
        ShuffleComponent sc;
        sc.original_index = specs[c.spec].original_index;
        sc.renaming = specs[c.spec].renaming;
        for (int wi : c.word_seq) sc.words.push_back(specs[c.spec].words[wi]);
        wit.components.push_back(std::move(sc));
    }
    return wit;
}

} // namespace

std::optional<ShuffleWitness> shuffle_decompose(const Word& p, const std::set<Word>& base_words,
                                                int m_bound) {
    Spec flat;
    for (const auto& w : base_words)
        if (!w.empty()) flat.words.push_back(w);
    std::vector<Spec> specs{std::move(flat)};
    return decompose_with_specs(p, specs, m_bound);
}

MeshReport mesh_member(const TypePtr& g, const std::vector<TypePtr>& originals, int depth, int base_len,
                       int m_bound) {
    MeshReport rep;
    rep.depth_bound = depth;
    rep.base_bound = base_len;
    rep.component_bound = m_bound;

    PathSet cand = enumerate_paths(paths_automaton(g), depth);
    std::set<RoleName> rset = type_roles(g);
    std::vector<RoleName> codom(rset.begin(), rset.end());

    std::vector<Spec> specs;
    for (size_t i = 0; i < originals.size(); ++i) {
        PathSet base = enumerate_paths(paths_automaton(originals[i]), base_len);
        std::vector<Word> words;
        for (const auto& w : base.all)
            if (!w.empty()) words.push_back(w);
        if (words.empty()) continue;
        std::set<RoleName> droles = type_roles(originals[i]);
        std::vector<RoleName> dom(droles.begin(), droles.end());
        for (auto& sigma : injections(dom, codom)) {
            Spec s;
            s.original_index = (int)i;
            for (const auto& w : words) s.words.push_back(rename_word(w, sigma));
            s.renaming = std::move(sigma);
            specs.push_back(std::move(s));
        }
    }

    size_t best_len = 0;
    for (const Word& p : cand.maximal) {
        ++rep.checked_paths;
        auto wit = decompose_with_specs(p, specs, m_bound);
        if (!wit) {
            rep.member = false;
            rep.failing = p;
            rep.witness.reset();
            return rep;
        }
        if (!rep.witness || p.size() >= best_len) {
            rep.witness = std::move(*wit);
            best_len = p.size();
        }
    }
    rep.member = true;
    return rep;
}

} // namespace chorm
