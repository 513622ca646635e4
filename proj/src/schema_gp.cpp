#include "schemaforge/schema_gp.hpp"

#include <algorithm>
#include <stdexcept>

namespace schemaforge::gp {

namespace {

void validate_schema_node(const TreeNode& node) {
    if (node.symbol == "#")
        throw std::invalid_argument("GpSchema: '#' is a hyperschema symbol");
    for (const auto& child : node.children) validate_schema_node(child);
}

void validate_hyperschema_node(const TreeNode& node) {
    if (node.symbol == "#" && !node.children.empty())
        throw std::invalid_argument("GpHyperschema: '#' must be a leaf");
    for (const auto& child : node.children) validate_hyperschema_node(child);
}

std::string pattern_to_string(const TreeNode& node) {
    if (node.children.empty()) return node.symbol;
    std::string out = "(" + node.symbol;
    for (const auto& child : node.children) out += " " + pattern_to_string(child);
    out += ")";
    return out;
}

TreeNode all_equals(const TreeNode& node) {
    TreeNode out{"=", {}};
    out.children.reserve(node.children.size());
    for (const auto& child : node.children) out.children.push_back(all_equals(child));
    return out;
}

bool match_node(const TreeNode& pat, const TreeNode& prog) {
    if (pat.symbol == "#") return true;
    if (pat.symbol != "=" && pat.symbol != prog.symbol) return false;
    if (pat.children.size() != prog.children.size()) return false;
    for (std::size_t i = 0; i < pat.children.size(); ++i)
        if (!match_node(pat.children[i], prog.children[i])) return false;
    return true;
}

// Path of child slots from the root to c; throws when c is not a grid coordinate.
std::vector<unsigned> slot_path(Coord c, unsigned base) {
    std::vector<unsigned> slots(c.depth);
    std::uint64_t idx = c.index;
    for (unsigned d = c.depth; d > 0; --d) {
        slots[d - 1] = static_cast<unsigned>(idx % base);
        idx /= base;
    }
    if (idx != 0) throw std::invalid_argument("coordinate outside the grid");
    return slots;
}

}  // namespace

GpSchema::GpSchema(TreeNode pattern) : pattern_(std::move(pattern)) {
    validate_schema_node(pattern_);
}

GpSchema GpSchema::parse(const std::string& text, const PrimitiveSet& ps) {
    return GpSchema(parse_pattern_text(text, ps));
}

GpSchema GpSchema::from_program(const TreeProgram& p) { return GpSchema(p.root()); }

std::string GpSchema::to_string() const { return pattern_to_string(pattern_); }

GpHyperschema GpSchema::to_hyperschema() const { return GpHyperschema(pattern_); }

GpHyperschema::GpHyperschema(TreeNode pattern) : pattern_(std::move(pattern)) {
    validate_hyperschema_node(pattern_);
}

GpHyperschema GpHyperschema::parse(const std::string& text, const PrimitiveSet& ps) {
    return GpHyperschema(parse_pattern_text(text, ps));
}

GpHyperschema GpHyperschema::universal() { return GpHyperschema(TreeNode{"#", {}}); }

std::string GpHyperschema::to_string() const { return pattern_to_string(pattern_); }

GpSchema shape_of(const TreeNode& pattern) { return GpSchema(all_equals(pattern)); }

GpSchemaMetrics gp_schema_metrics(const GpSchema& h) {
    GpSchemaMetrics m;
    m.shape = shape_of(h.pattern());

    // Gather fixed-node slot paths while counting nodes.
    std::vector<std::vector<unsigned>> fixed_paths;
    std::vector<unsigned> path;
    auto rec = [&](auto&& self, const TreeNode& node) -> void {
        ++m.length;
        if (node.symbol != "=") {
            ++m.order;
            fixed_paths.push_back(path);
        }
        for (unsigned j = 0; j < node.children.size(); ++j) {
            path.push_back(j);
            self(self, node.children[j]);
            path.pop_back();
        }
    };
    rec(rec, h.pattern());

    if (m.order <= 1) {
        m.defining_length = 0;
        return m;
    }
    // Minimal fragment containing all fixed nodes: the union of the paths
    // from their deepest common ancestor. Its link count is node count - 1.
    std::size_t lca_depth = fixed_paths.front().size();
    for (const auto& p : fixed_paths) {
        lca_depth = std::min(lca_depth, p.size());
        for (std::size_t d = 0; d < lca_depth; ++d)
            if (p[d] != fixed_paths.front()[d]) { lca_depth = d; break; }
    }
    std::vector<std::vector<unsigned>> fragment_nodes;
    for (const auto& p : fixed_paths)
        for (std::size_t len = lca_depth; len <= p.size(); ++len)
            fragment_nodes.emplace_back(p.begin(), p.begin() + len);
    std::sort(fragment_nodes.begin(), fragment_nodes.end());
    fragment_nodes.erase(std::unique(fragment_nodes.begin(), fragment_nodes.end()),
                         fragment_nodes.end());
    m.defining_length = static_cast<unsigned>(fragment_nodes.size() - 1);
    return m;
}

bool gp_matches(const GpSchema& h, const TreeProgram& p) {
    return match_node(h.pattern(), p.root());
}

bool gp_matches(const GpHyperschema& h, const TreeProgram& p) {
    return match_node(h.pattern(), p.root());
}

bool shape_matches(const GpSchema& shape, const TreeProgram& p) {
    return match_node(all_equals(shape.pattern()), p.root());
}

const char* lower_block_form_name(LowerBlockForm form) {
    switch (form) {
        case LowerBlockForm::Path: return "path";
        case LowerBlockForm::Literal: return "literal";
        case LowerBlockForm::Shape: return "shape";
    }
    return "?";
}

namespace {

const TreeNode* pattern_node_at(const TreeNode& root, Coord c, unsigned base) {
    auto slots = slot_path(c, base);
    const TreeNode* node = &root;
    for (unsigned slot : slots) {
        if (slot >= node->children.size()) return nullptr;
        node = &node->children[slot];
    }
    return node;
}

// H with the subtree rooted at `point` rebuilt by fn(subtree).
TreeNode rebuild_at(const TreeNode& root, const std::vector<unsigned>& slots, std::size_t at,
                    const std::function<TreeNode(const TreeNode&)>& fn) {
    if (at == slots.size()) return fn(root);
    TreeNode out = root;
    out.children[slots[at]] = rebuild_at(root.children[slots[at]], slots, at + 1, fn);
    return out;
}

}  // namespace

GpHyperschema upper_block(const GpSchema& h, Coord point, const PrimitiveSet& ps) {
    auto slots = slot_path(point, ps.grid_base());
    if (!pattern_node_at(h.pattern(), point, ps.grid_base()))
        throw std::invalid_argument("upper_block: point outside the schema shape");
    return GpHyperschema(rebuild_at(h.pattern(), slots, 0,
                                    [](const TreeNode&) { return TreeNode{"#", {}}; }));
}

GpHyperschema lower_block(const GpSchema& h, Coord point, const PrimitiveSet& ps,
                          LowerBlockForm form) {
    const unsigned base = ps.grid_base();
    auto slots = slot_path(point, base);
    if (!pattern_node_at(h.pattern(), point, base))
        throw std::invalid_argument("lower_block: point outside the schema shape");

    if (form == LowerBlockForm::Shape) {
        // Whole shape kept; everything outside the point's subtree -> "=".
        auto rec = [&](auto&& self, const TreeNode& node, std::size_t at) -> TreeNode {
            if (at == slots.size()) return node;  // keep H's subtree verbatim
            TreeNode out = all_equals(node);
            out.children[slots[at]] = self(self, node.children[slots[at]], at + 1);
            return out;
        };
        return GpHyperschema(rec(rec, h.pattern(), 0));
    }
    if (form == LowerBlockForm::Literal) {
        // Only the path interior (strictly between root and point) -> "=".
        auto rec = [&](auto&& self, const TreeNode& node, std::size_t at) -> TreeNode {
            if (at == slots.size()) return node;
            TreeNode out = node;
            if (at != 0) out.symbol = "=";
            out.children[slots[at]] = self(self, node.children[slots[at]], at + 1);
            return out;
        };
        return GpHyperschema(rec(rec, h.pattern(), 0));
    }
    // Path form: root and path interior -> "=" (arities kept), subtrees
    // hanging off the path -> "#", subtree at the point kept.
    auto rec = [&](auto&& self, const TreeNode& node, std::size_t at) -> TreeNode {
        if (at == slots.size()) return node;
        TreeNode out{"=", {}};
        out.children.reserve(node.children.size());
        for (unsigned j = 0; j < node.children.size(); ++j) {
            if (j == slots[at])
                out.children.push_back(self(self, node.children[j], at + 1));
            else
                out.children.push_back(TreeNode{"#", {}});
        }
        return out;
    };
    return GpHyperschema(rec(rec, h.pattern(), 0));
}

BuildingBlocks building_blocks(const GpSchema& h, Coord point, const PrimitiveSet& ps) {
    const unsigned base = ps.grid_base();
    auto slots = slot_path(point, base);
    if (!pattern_node_at(h.pattern(), point, base))
        throw std::invalid_argument("building_blocks: point outside the schema shape");

    BuildingBlocks out;
    out.u = GpSchema(rebuild_at(h.pattern(), slots, 0,
                                [](const TreeNode& sub) { return all_equals(sub); }));
    // l: outside the point's subtree -> "=", subtree kept.
    auto lower_shape_node = [&](auto&& self, const TreeNode& node, std::size_t at) -> TreeNode {
        if (at == slots.size()) return node;
        TreeNode ln = all_equals(node);
        ln.children[slots[at]] = self(self, node.children[slots[at]], at + 1);
        return ln;
    };
    out.l = GpSchema(lower_shape_node(lower_shape_node, h.pattern(), 0));
    out.upper = upper_block(h, point, ps);
    out.lower_path = lower_block(h, point, ps, LowerBlockForm::Path);
    out.lower_literal = lower_block(h, point, ps, LowerBlockForm::Literal);
    out.lower_shape = lower_block(h, point, ps, LowerBlockForm::Shape);
    return out;
}

GpHyperschema gamma(const GpSchema& h, const GpMask& mask, const PrimitiveSet& ps) {
    const unsigned base = ps.grid_base();
    // The mask must label exactly the coordinates of H's shape.
    std::size_t nodes = 0;
    auto rec = [&](auto&& self, const TreeNode& node, Coord c) -> TreeNode {
        ++nodes;
        auto it = mask.bits.find(c);
        if (it == mask.bits.end())
            throw std::invalid_argument("gamma: mask does not cover the schema shape");
        TreeNode out{it->second ? node.symbol : "=", {}};
        out.children.reserve(node.children.size());
        for (unsigned j = 0; j < node.children.size(); ++j)
            out.children.push_back(self(self, node.children[j], child_coord(c, j, base)));
        return out;
    };
    TreeNode pattern = rec(rec, h.pattern(), Coord{0, 0});
    if (nodes != mask.bits.size())
        throw std::invalid_argument("gamma: mask labels coordinates outside the schema shape");
    return GpHyperschema(std::move(pattern));
}

std::vector<TreeProgram> enumerate_programs(const PrimitiveSet& ps, std::size_t max_nodes) {
    // sized[k] holds every program of exactly k nodes, built by combining
    // smaller programs under each function symbol.
    std::vector<std::vector<TreeNode>> sized(max_nodes + 1);
    if (max_nodes == 0) return {};
    for (const auto& t : ps.terminals()) sized[1].push_back(TreeNode{t, {}});
    for (std::size_t total = 2; total <= max_nodes; ++total) {
        for (const auto& f : ps.functions()) {
            if (f.arity + 1 > total) continue;
            // Distribute total-1 nodes over f.arity children, each >= 1.
            std::vector<std::size_t> parts(f.arity, 1);
            std::vector<TreeNode> child_buf(f.arity);
            auto assemble = [&](auto&& self, unsigned slot) -> void {
                if (slot == f.arity) {
                    TreeNode node{f.name, child_buf};
                    sized[total].push_back(std::move(node));
                    return;
                }
                for (const auto& sub : sized[parts[slot]]) {
                    child_buf[slot] = sub;
                    self(self, slot + 1);
                }
            };
            auto split = [&](auto&& self, unsigned slot, std::size_t remaining) -> void {
                if (slot + 1 == f.arity) {
                    parts[slot] = remaining;
                    if (remaining >= 1) assemble(assemble, 0);
                    return;
                }
                for (std::size_t take = 1; take + (f.arity - slot - 1) <= remaining; ++take) {
                    parts[slot] = take;
                    self(self, slot + 1, remaining - take);
                }
            };
            split(split, 0, total - 1);
        }
    }
    std::vector<TreeProgram> out;
    for (const auto& bucket : sized)
        for (const auto& node : bucket) out.push_back(TreeProgram(node));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](const TreeProgram& a, const TreeProgram& b) { return a == b; }),
              out.end());
    return out;
}

std::vector<TreeProgram> programs_of_shape(const GpSchema& shape, const PrimitiveSet& ps) {
    auto expand = [&](auto&& self, const TreeNode& node) -> std::vector<TreeNode> {
        std::vector<std::vector<TreeNode>> child_options;
        for (const auto& child : node.children) child_options.push_back(self(self, child));
        auto symbols = ps.symbols_with_arity(node.arity());
        std::vector<TreeNode> out;
        std::vector<TreeNode> current(node.children.size());
        auto combine = [&](auto&& comb, std::size_t slot) -> void {
            if (slot == child_options.size()) {
                for (const auto& sym : symbols) out.push_back(TreeNode{sym, current});
                return;
            }
            for (const auto& option : child_options[slot]) {
                current[slot] = option;
                comb(comb, slot + 1);
            }
        };
        combine(combine, 0);
        return out;
    };
    std::vector<TreeProgram> result;
    for (auto& node : expand(expand, shape.pattern())) result.push_back(TreeProgram(std::move(node)));
    std::sort(result.begin(), result.end());
    return result;
}

std::vector<GpSchema> schemata_of_shape(const GpSchema& shape, const PrimitiveSet& ps) {
    auto expand = [&](auto&& self, const TreeNode& node) -> std::vector<TreeNode> {
        std::vector<std::vector<TreeNode>> child_options;
        for (const auto& child : node.children) child_options.push_back(self(self, child));
        auto symbols = ps.symbols_with_arity(node.arity());
        symbols.push_back("=");
        std::vector<TreeNode> out;
        std::vector<TreeNode> current(node.children.size());
        auto combine = [&](auto&& comb, std::size_t slot) -> void {
            if (slot == child_options.size()) {
                for (const auto& sym : symbols) out.push_back(TreeNode{sym, current});
                return;
            }
            for (const auto& option : child_options[slot]) {
                current[slot] = option;
                comb(comb, slot + 1);
            }
        };
        combine(combine, 0);
        return out;
    };
    std::vector<GpSchema> result;
    for (auto& node : expand(expand, shape.pattern())) result.push_back(GpSchema(std::move(node)));
    return result;
}

}  // namespace schemaforge::gp
