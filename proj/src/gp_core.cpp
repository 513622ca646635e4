#include "schemaforge/gp_core.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace schemaforge::gp {

PrimitiveSet::PrimitiveSet(std::vector<Primitive> functions, std::vector<std::string> terminals)
    : functions_(std::move(functions)), terminals_(std::move(terminals)) {
    if (terminals_.empty()) throw std::invalid_argument("PrimitiveSet: at least one terminal required");
    std::vector<std::string> names;
    for (const auto& f : functions_) {
        if (f.arity == 0) throw std::invalid_argument("PrimitiveSet: function arity must be >= 1");
        names.push_back(f.name);
        max_arity_ = std::max(max_arity_, f.arity);
    }
    for (const auto& t : terminals_) names.push_back(t);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end())
        throw std::invalid_argument("PrimitiveSet: duplicate symbol name");
    for (const auto& n : names) {
        if (n.empty() || n == "=" || n == "#")
            throw std::invalid_argument("PrimitiveSet: '=' and '#' are reserved pattern symbols");
        if (n.find_first_of("() \t\n") != std::string::npos)
            throw std::invalid_argument("PrimitiveSet: symbol '" + n + "' contains delimiter characters");
    }
}

std::optional<unsigned> PrimitiveSet::arity_of(const std::string& name) const {
    for (const auto& f : functions_)
        if (f.name == name) return f.arity;
    for (const auto& t : terminals_)
        if (t == name) return 0u;
    return std::nullopt;
}

std::vector<std::string> PrimitiveSet::symbols_with_arity(unsigned arity) const {
    std::vector<std::string> out;
    if (arity == 0) return terminals_;
    for (const auto& f : functions_)
        if (f.arity == arity) out.push_back(f.name);
    return out;
}

bool TreeNode::operator==(const TreeNode& other) const {
    if (symbol != other.symbol || children.size() != other.children.size()) return false;
    for (std::size_t i = 0; i < children.size(); ++i)
        if (!(children[i] == other.children[i])) return false;
    return true;
}

bool TreeNode::operator<(const TreeNode& other) const {
    if (symbol != other.symbol) return symbol < other.symbol;
    if (children.size() != other.children.size()) return children.size() < other.children.size();
    for (std::size_t i = 0; i < children.size(); ++i) {
        if (children[i] < other.children[i]) return true;
        if (other.children[i] < children[i]) return false;
    }
    return false;
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (c == '(' || c == ')') {
            if (!current.empty()) { tokens.push_back(current); current.clear(); }
            tokens.push_back(std::string(1, c));
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!current.empty()) { tokens.push_back(current); current.clear(); }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(current);
    return tokens;
}

// Recursive-descent over the token stream; pattern mode admits "=" and "#".
TreeNode parse_node(const std::vector<std::string>& tokens, std::size_t& pos, bool pattern_mode,
                    const PrimitiveSet* ps) {
    if (pos >= tokens.size()) throw std::invalid_argument("tree parse: unexpected end of input");
    const std::string& tok = tokens[pos];
    if (tok == ")") throw std::invalid_argument("tree parse: unexpected ')'");
    if (tok != "(") {
        ++pos;
        TreeNode leaf{tok, {}};
        if (pattern_mode && (tok == "=" || tok == "#")) return leaf;
        if (ps) {
            auto arity = ps->arity_of(tok);
            if (!arity) throw std::invalid_argument("tree parse: unknown symbol '" + tok + "'");
            if (*arity != 0)
                throw std::invalid_argument("tree parse: function '" + tok + "' used as a leaf");
        }
        return leaf;
    }
    ++pos;  // consume '('
    if (pos >= tokens.size()) throw std::invalid_argument("tree parse: unexpected end after '('");
    TreeNode node{tokens[pos], {}};
    if (node.symbol == "(" || node.symbol == ")")
        throw std::invalid_argument("tree parse: expected a symbol after '('");
    ++pos;
    while (pos < tokens.size() && tokens[pos] != ")")
        node.children.push_back(parse_node(tokens, pos, pattern_mode, ps));
    if (pos >= tokens.size()) throw std::invalid_argument("tree parse: missing ')'");
    ++pos;  // consume ')'
    if (pattern_mode && node.symbol == "#") {
        if (!node.children.empty())
            throw std::invalid_argument("tree parse: '#' must be a leaf");
        return node;
    }
    if (pattern_mode && node.symbol == "=") return node;
    if (ps) {
        auto arity = ps->arity_of(node.symbol);
        if (!arity) throw std::invalid_argument("tree parse: unknown symbol '" + node.symbol + "'");
        if (*arity != node.arity())
            throw std::invalid_argument("tree parse: '" + node.symbol + "' expects " +
                                        std::to_string(*arity) + " children");
    }
    return node;
}

TreeNode parse_tree_text(const std::string& text, bool pattern_mode, const PrimitiveSet* ps) {
    auto tokens = tokenize(text);
    std::size_t pos = 0;
    TreeNode root = parse_node(tokens, pos, pattern_mode, ps);
    if (pos != tokens.size()) throw std::invalid_argument("tree parse: trailing tokens in '" + text + "'");
    return root;
}

void print_node(const TreeNode& node, std::string& out) {
    if (node.children.empty()) {
        out += node.symbol;
        return;
    }
    out += "(";
    out += node.symbol;
    for (const auto& child : node.children) {
        out += " ";
        print_node(child, out);
    }
    out += ")";
}

std::size_t node_count(const TreeNode& node) {
    std::size_t total = 1;
    for (const auto& child : node.children) total += node_count(child);
    return total;
}

unsigned node_depth(const TreeNode& node) {
    unsigned deepest = 0;
    for (const auto& child : node.children) deepest = std::max(deepest, node_depth(child) + 1);
    return deepest;
}

void shape_node(const TreeNode& node, std::string& out) {
    if (node.children.empty()) {
        out += "0";
        return;
    }
    out += "(";
    out += std::to_string(node.arity());
    for (const auto& child : node.children) {
        out += " ";
        shape_node(child, out);
    }
    out += ")";
}

}  // namespace

TreeProgram TreeProgram::parse(const std::string& text, const PrimitiveSet& ps) {
    return TreeProgram(parse_tree_text(text, /*pattern_mode=*/false, &ps));
}

TreeNode parse_pattern_text(const std::string& text, const PrimitiveSet& ps) {
    return parse_tree_text(text, /*pattern_mode=*/true, &ps);
}

std::size_t TreeProgram::size() const { return node_count(root_); }

unsigned TreeProgram::depth() const { return node_depth(root_); }

std::string TreeProgram::to_string() const {
    std::string out;
    print_node(root_, out);
    return out;
}

std::string TreeProgram::shape_key() const {
    std::string out;
    shape_node(root_, out);
    return out;
}

const TreeNode* node_at(const TreeNode& root, Coord c, unsigned base) {
    // Decode the child-slot digits of c.index top-down.
    std::vector<unsigned> slots(c.depth);
    std::uint64_t idx = c.index;
    for (unsigned d = c.depth; d > 0; --d) {
        slots[d - 1] = static_cast<unsigned>(idx % base);
        idx /= base;
    }
    if (idx != 0) return nullptr;  // index too large for this depth
    const TreeNode* node = &root;
    for (unsigned slot : slots) {
        if (slot >= node->children.size()) return nullptr;
        node = &node->children[slot];
    }
    return node;
}

TreeNode with_subtree_replaced(const TreeNode& root, Coord c, const TreeNode& replacement,
                               unsigned base) {
    if (c.depth == 0) {
        if (c.index != 0) throw std::invalid_argument("with_subtree_replaced: bad root coordinate");
        return replacement;
    }
    std::vector<unsigned> slots(c.depth);
    std::uint64_t idx = c.index;
    for (unsigned d = c.depth; d > 0; --d) {
        slots[d - 1] = static_cast<unsigned>(idx % base);
        idx /= base;
    }
    if (idx != 0) throw std::invalid_argument("with_subtree_replaced: coordinate unoccupied");
    TreeNode out = root;
    TreeNode* node = &out;
    for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
        if (slots[i] >= node->children.size())
            throw std::invalid_argument("with_subtree_replaced: coordinate unoccupied");
        node = &node->children[slots[i]];
    }
    if (slots.back() >= node->children.size())
        throw std::invalid_argument("with_subtree_replaced: coordinate unoccupied");
    node->children[slots.back()] = replacement;
    return out;
}

void visit_coords(const TreeNode& root, unsigned base,
                  const std::function<void(Coord, const TreeNode&)>& fn) {
    auto rec = [&](auto&& self, const TreeNode& node, Coord c) -> void {
        fn(c, node);
        for (unsigned j = 0; j < node.children.size(); ++j)
            self(self, node.children[j], child_coord(c, j, base));
    };
    rec(rec, root, Coord{0, 0});
}

NodeInfo node_accessors(const TreeProgram& t, unsigned d, std::uint64_t i, const PrimitiveSet& ps) {
    const TreeNode* node = node_at(t.root(), Coord{d, i}, ps.grid_base());
    if (!node) throw std::invalid_argument("node_accessors: coordinate unoccupied");
    return NodeInfo{node->symbol, node_count(*node), node->arity(), node->arity() > 0};
}

bool CommonRegion::contains(Coord c) const {
    return std::binary_search(nodes.begin(), nodes.end(), c);
}

CommonRegion common_region(const TreeProgram& t1, const TreeProgram& t2, const PrimitiveSet& ps) {
    const unsigned base = ps.grid_base();
    CommonRegion region;
    auto rec = [&](auto&& self, const TreeNode& a, const TreeNode& b, Coord c) -> void {
        region.nodes.push_back(c);
        if (a.arity() != b.arity()) return;  // children fall outside the region
        for (unsigned j = 0; j < a.children.size(); ++j)
            self(self, a.children[j], b.children[j], child_coord(c, j, base));
    };
    rec(rec, t1.root(), t2.root(), Coord{0, 0});
    std::sort(region.nodes.begin(), region.nodes.end());
    region.links.assign(region.nodes.begin(), region.nodes.end());
    region.links.erase(std::remove(region.links.begin(), region.links.end(), Coord{0, 0}),
                       region.links.end());
    return region;
}

TreeProgram one_point_crossover_gp(const TreeProgram& t1, const TreeProgram& t2, Coord point,
                                   const PrimitiveSet& ps) {
    const auto region = common_region(t1, t2, ps);
    if (point == Coord{0, 0} || !region.contains(point))
        throw std::invalid_argument("one_point_crossover_gp: point is not a common-region link");
    const TreeNode* donor = node_at(t2.root(), point, ps.grid_base());
    return TreeProgram(with_subtree_replaced(t1.root(), point, *donor, ps.grid_base()));
}

GpMask GpMask::constant(const CommonRegion& region, std::uint8_t value) {
    GpMask mask;
    for (auto c : region.nodes) mask.bits[c] = value;
    return mask;
}

GpMask GpMask::random(const CommonRegion& region, RandomStream& rng) {
    GpMask mask;
    for (auto c : region.nodes) mask.bits[c] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
    return mask;
}

GpMask GpMask::complement() const {
    GpMask out;
    for (const auto& [c, b] : bits) out.bits[c] = static_cast<std::uint8_t>(1 - b);
    return out;
}

std::uint8_t GpMask::at(Coord c) const {
    auto it = bits.find(c);
    if (it == bits.end()) throw std::invalid_argument("GpMask: coordinate not labeled");
    return it->second;
}

bool GpMask::covers(const CommonRegion& region) const {
    if (bits.size() != region.nodes.size()) return false;
    for (auto c : region.nodes)
        if (!bits.count(c)) return false;
    return true;
}

TreeProgram uniform_crossover_gp(const TreeProgram& t1, const TreeProgram& t2, const GpMask& mask,
                                 const PrimitiveSet& ps) {
    const auto region = common_region(t1, t2, ps);
    if (!mask.covers(region))
        throw std::invalid_argument("uniform_crossover_gp: mask does not cover the common region");
    const unsigned base = ps.grid_base();
    auto rec = [&](auto&& self, const TreeNode& a, const TreeNode& b, Coord c) -> TreeNode {
        const TreeNode& source = mask.at(c) ? a : b;
        if (a.arity() != b.arity()) return source;  // boundary: subtrees travel with the node
        TreeNode out{source.symbol, {}};
        out.children.reserve(a.children.size());
        for (unsigned j = 0; j < a.children.size(); ++j)
            out.children.push_back(self(self, a.children[j], b.children[j], child_coord(c, j, base)));
        return out;
    };
    return TreeProgram(rec(rec, t1.root(), t2.root(), Coord{0, 0}));
}

TreeProgram point_mutation_gp(const TreeProgram& t, const Rat& p_m, const PrimitiveSet& ps,
                              RandomStream& rng) {
    const double p = to_double(p_m);
    auto rec = [&](auto&& self, const TreeNode& node) -> TreeNode {
        TreeNode out{node.symbol, {}};
        if (rng.bernoulli(p)) {
            auto candidates = ps.symbols_with_arity(node.arity());
            std::erase(candidates, node.symbol);
            if (!candidates.empty())
                out.symbol = candidates[static_cast<std::size_t>(rng.uniform_index(candidates.size()))];
        }
        out.children.reserve(node.children.size());
        for (const auto& child : node.children) out.children.push_back(self(self, child));
        return out;
    };
    return TreeProgram(rec(rec, t.root()));
}

void GpConfig::validate() const {
    if (n < 2) throw std::invalid_argument("GpConfig: n must be >= 2");
    if (p_c < 0 || p_c > 1) throw std::invalid_argument("GpConfig: p_c must lie in [0,1]");
    if (p_m < 0 || p_m > 1) throw std::invalid_argument("GpConfig: p_m must lie in [0,1]");
    if (selection.kind == SelectionSpec::Kind::Tournament) {
        const auto& t = selection.tournament;
        if (t.size < 2) throw std::invalid_argument("GpConfig: tournament size must be >= 2");
        if (t.size > n) throw std::invalid_argument("GpConfig: tournament size must be <= n");
        if (t.bias < 0.5 || t.bias > 1.0)
            throw std::invalid_argument("GpConfig: tournament bias must lie in [0.5,1]");
    }
}

GpFitnessFunction GpFitnessFunction::flat() {
    GpFitnessFunction f;
    f.name_ = "flat";
    return f;
}

GpFitnessFunction GpFitnessFunction::node_count() {
    GpFitnessFunction f;
    f.name_ = "node-count";
    return f;
}

GpFitnessFunction GpFitnessFunction::depth() {
    GpFitnessFunction f;
    f.name_ = "depth";
    return f;
}

GpFitnessFunction GpFitnessFunction::symbol_count(std::string symbol) {
    GpFitnessFunction f;
    f.name_ = "symbol-count";
    f.symbol_ = std::move(symbol);
    return f;
}

GpFitnessFunction GpFitnessFunction::user_table(std::map<std::string, Rat> table) {
    GpFitnessFunction f;
    f.name_ = "user-table";
    f.table_ = std::move(table);
    for (const auto& [key, value] : f.table_)
        if (value <= 0)
            throw std::domain_error("user-table: fitness for '" + key + "' must be positive");
    return f;
}

Rat GpFitnessFunction::operator()(const TreeProgram& t) const {
    Rat result;
    if (name_ == "flat") {
        result = 1;
    } else if (name_ == "node-count") {
        result = Rat(t.size());
    } else if (name_ == "depth") {
        result = Rat(t.depth()) + 1;
    } else if (name_ == "symbol-count") {
        std::size_t hits = 0;
        auto rec = [&](auto&& self, const TreeNode& node) -> void {
            if (node.symbol == symbol_) ++hits;
            for (const auto& child : node.children) self(self, child);
        };
        rec(rec, t.root());
        result = Rat(hits) + 1;
    } else if (name_ == "user-table") {
        auto it = table_.find(t.to_string());
        if (it == table_.end())
            throw std::domain_error("user-table: no entry for '" + t.to_string() + "'");
        result = it->second;
    } else {
        throw std::domain_error("unknown tree fitness '" + name_ + "'");
    }
    if (result <= 0) throw std::domain_error("tree fitness must be strictly positive");
    return result;
}

std::vector<Rat> selection_masses_gp(const GpPopulation& pop, const GpFitnessFunction& f) {
    std::vector<Rat> values;
    values.reserve(pop.members.size());
    Rat total = 0;
    for (const auto& member : pop.members) {
        values.push_back(f(member));
        total += values.back();
    }
    if (total <= 0) throw std::domain_error("selection: total fitness is zero");
    for (auto& v : values) v /= total;
    return values;
}

namespace {

std::size_t proportional_pick_gp(const std::vector<double>& cumulative, RandomStream& rng) {
    const double u = rng.uniform01() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::size_t tournament_pick_gp(const std::vector<Rat>& fitness, const TournamentSpec& spec,
                               RandomStream& rng) {
    std::vector<std::size_t> round;
    round.reserve(spec.size);
    for (unsigned i = 0; i < spec.size; ++i)
        round.push_back(static_cast<std::size_t>(rng.uniform_index(fitness.size())));
    while (round.size() > 1) {
        std::vector<std::size_t> next;
        next.reserve(round.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < round.size(); i += 2) {
            const std::size_t a = round[i];
            const std::size_t b = round[i + 1];
            std::size_t fitter = a;
            std::size_t weaker = b;
            if (fitness[b] > fitness[a]) { fitter = b; weaker = a; }
            next.push_back(rng.bernoulli(spec.bias) ? fitter : weaker);
        }
        if (round.size() % 2 == 1) next.push_back(round.back());
        round.swap(next);
    }
    return round.front();
}

}  // namespace

TreeProgram select_parent_gp(const GpPopulation& pop, const GpFitnessFunction& f,
                             const GpConfig& cfg, RandomStream& rng) {
    if (pop.members.empty()) throw std::invalid_argument("select_parent_gp: empty population");
    std::vector<Rat> fitness;
    fitness.reserve(pop.members.size());
    for (const auto& member : pop.members) fitness.push_back(f(member));
    if (cfg.selection.kind == SelectionSpec::Kind::Proportional) {
        std::vector<double> cumulative;
        double acc = 0.0;
        for (const auto& v : fitness) { acc += to_double(v); cumulative.push_back(acc); }
        if (cumulative.back() <= 0.0) throw std::domain_error("selection: total fitness is zero");
        return pop.members[proportional_pick_gp(cumulative, rng)];
    }
    if (cfg.selection.tournament.size > pop.members.size())
        throw std::invalid_argument("select_parent_gp: tournament size exceeds population size");
    return pop.members[tournament_pick_gp(fitness, cfg.selection.tournament, rng)];
}

GpPopulation next_generation_gp(const GpPopulation& pop, const GpFitnessFunction& f,
                                const GpConfig& cfg, const PrimitiveSet& ps,
                                const CrossoverObserver* observer) {
    cfg.validate();
    if (pop.size() != cfg.n)
        throw std::invalid_argument("next_generation_gp: population size != cfg.n");
    const double pc = to_double(cfg.p_c);

    const bool proportional = cfg.selection.kind == SelectionSpec::Kind::Proportional;
    std::vector<Rat> fitness;
    std::vector<double> cumulative;
    fitness.reserve(pop.members.size());
    for (const auto& member : pop.members) fitness.push_back(f(member));
    if (proportional) {
        double acc = 0.0;
        for (const auto& v : fitness) { acc += to_double(v); cumulative.push_back(acc); }
        if (cumulative.back() <= 0.0) throw std::domain_error("selection: total fitness is zero");
    } else if (cfg.selection.tournament.size > pop.members.size()) {
        throw std::invalid_argument("next_generation_gp: tournament size exceeds population size");
    }
    auto pick = [&](RandomStream& rng) -> const TreeProgram& {
        return proportional
                   ? pop.members[proportional_pick_gp(cumulative, rng)]
                   : pop.members[tournament_pick_gp(fitness, cfg.selection.tournament, rng)];
    };

    GpPopulation next;
    next.generation = pop.generation + 1;
    next.members.reserve(cfg.n);
    for (unsigned j = 0; j < cfg.n; ++j) {
        RandomStream rng(substream_seed(cfg.seed, pop.generation, j));
        TreeProgram child;
        if (rng.bernoulli(pc)) {
            const TreeProgram& a = pick(rng);
            const TreeProgram& b = pick(rng);
            const auto region = common_region(a, b, ps);
            if (cfg.crossover == GpConfig::Crossover::OnePoint) {
                if (region.links.empty()) {
                    child = a;  // no cut points: degenerate to cloning the first parent
                } else {
                    const auto point =
                        region.links[static_cast<std::size_t>(rng.uniform_index(region.links.size()))];
                    child = one_point_crossover_gp(a, b, point, ps);
                }
            } else {
                child = uniform_crossover_gp(a, b, GpMask::random(region, rng), ps);
            }
            if (observer && observer->on_crossover) observer->on_crossover(a, child);
        } else {
            child = pick(rng);
        }
        next.members.push_back(cfg.p_m == 0 ? child : point_mutation_gp(child, cfg.p_m, ps, rng));
    }
    return next;
}

TreeProgram random_tree(const PrimitiveSet& ps, unsigned max_depth, RandomStream& rng) {
    auto rec = [&](auto&& self, unsigned depth) -> TreeNode {
        std::vector<Primitive> candidates;
        for (const auto& t : ps.terminals()) candidates.push_back({t, 0});
        if (depth < max_depth)
            for (const auto& f : ps.functions()) candidates.push_back(f);
        const auto& chosen = candidates[static_cast<std::size_t>(rng.uniform_index(candidates.size()))];
        TreeNode node{chosen.name, {}};
        for (unsigned j = 0; j < chosen.arity; ++j) node.children.push_back(self(self, depth + 1));
        return node;
    };
    return TreeProgram(rec(rec, 0));
}

}  // namespace schemaforge::gp
