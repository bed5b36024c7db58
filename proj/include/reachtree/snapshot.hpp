#pragma once

#include "reachtree/errors.hpp"
#include "reachtree/mcts.hpp"
#include "reachtree/text.hpp"

#include <array>
#include <string>
#include <string_view>

namespace reachtree {

// Tree snapshot, versioned structured text:
//
//   reachtree tree v1
//   params cp <f> threshold <u> bins <i> <i> <i> <i> seed <u> prospect_k <f>
//   nodes <count>
//   n <level> <bin> <visits> <q_total>
//   l <value> <weight> <promoted>...        (one triple per child bin)
//
// Nodes appear in depth-first pre-order with children in ascending bin order;
// each internal node is immediately followed by its prospect layer line.
// Floats are written shortest-round-trip, so save -> load -> save is
// byte-identical.

namespace detail {

inline void save_node(const Tree& tree, std::int32_t id, std::string& out) {
    const TreeNode& n = tree.node(id);
    out += "n ";
    out += std::to_string(n.level);
    out += ' ';
    out += std::to_string(n.bin);
    out += ' ';
    out += std::to_string(n.stats.n_visits);
    out += ' ';
    out += fmt_double(n.stats.q_total);
    out += '\n';
    if (n.level == kTreeDepth) return;
    out += 'l';
    for (const ProspectCell& c : n.prospects.cells) {
        out += ' ';
        out += fmt_double(c.value);
        out += ' ';
        out += fmt_double(c.weight);
        out += c.promoted ? " 1" : " 0";
    }
    out += '\n';
    for (std::int32_t child : n.children)
        if (child >= 0) save_node(tree, child, out);
}

} // namespace detail

inline std::string save_tree(const Tree& tree) {
    const SearchParams& p = tree.params();
    std::string out = "reachtree tree v1\n";
    out += "params cp " + fmt_double(p.cp);
    out += " threshold " + std::to_string(p.visit_threshold);
    out += " bins";
    for (int b : p.bins) out += ' ' + std::to_string(b);
    out += " seed " + std::to_string(p.rng_seed);
    out += " prospect_k " + fmt_double(p.prospect_k);
    out += '\n';
    out += "nodes " + std::to_string(tree.node_count()) + '\n';
    detail::save_node(tree, 0, out);
    return out;
}

inline Tree load_tree(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t ln = 0; // 0-based index; diagnostics report ln+1

    auto line_or_throw = [&](const char* what) -> std::string_view {
        if (ln >= lines.size())
            throw ParseError(lines.size() + 1, what, "unexpected end of snapshot");
        return lines[ln];
    };

    if (line_or_throw("header") != "reachtree tree v1")
        throw ParseError(1, "header", "expected 'reachtree tree v1'");
    ++ln;

    const auto pt = split_ws(line_or_throw("params"));
    if (pt.size() != 14 || pt[0] != "params" || pt[1] != "cp" || pt[3] != "threshold" ||
        pt[5] != "bins" || pt[10] != "seed" || pt[12] != "prospect_k")
        throw ParseError(ln + 1, "params", "malformed params line");
    SearchParams params;
    const auto cp = parse_double(pt[2]);
    const auto threshold = parse_uint(pt[4]);
    if (!cp || !threshold) throw ParseError(ln + 1, "params", "bad cp/threshold value");
    params.cp = *cp;
    params.visit_threshold = *threshold;
    for (int i = 0; i < kTreeDepth; ++i) {
        const auto b = parse_int(pt[static_cast<std::size_t>(6 + i)]);
        if (!b || *b < 2) throw ParseError(ln + 1, "params", "bad bin count");
        params.bins[static_cast<std::size_t>(i)] = static_cast<int>(*b);
    }
    const auto seed = parse_uint(pt[11]);
    const auto k = parse_double(pt[13]);
    if (!seed || !k) throw ParseError(ln + 1, "params", "bad seed/prospect_k value");
    params.rng_seed = *seed;
    params.prospect_k = *k;
    ++ln;

    const auto ct = split_ws(line_or_throw("nodes"));
    if (ct.size() != 2 || ct[0] != "nodes")
        throw ParseError(ln + 1, "nodes", "expected 'nodes <count>'");
    const auto declared = parse_uint(ct[1]);
    if (!declared) throw ParseError(ln + 1, "nodes", "bad node count");
    ++ln;

    Tree tree(params);
    std::array<std::int32_t, kTreeDepth + 1> last{}; // most recent node per level
    last.fill(-1);
    std::uint64_t seen = 0;

    while (ln < lines.size()) {
        const auto nt = split_ws(lines[ln]);
        if (nt.size() != 5 || nt[0] != "n")
            throw ParseError(ln + 1, "node", "expected 'n <level> <bin> <visits> <q>'");
        const auto level = parse_int(nt[1]);
        const auto bin = parse_int(nt[2]);
        const auto visits = parse_uint(nt[3]);
        const auto q = parse_double(nt[4]);
        if (!level || !bin || !visits || !q) throw ParseError(ln + 1, "node", "bad node field");

        std::int32_t id;
        if (*level == 0) {
            if (seen != 0) throw ParseError(ln + 1, "node", "duplicate root");
            if (*bin != -1) throw ParseError(ln + 1, "node", "root bin must be -1");
            id = 0;
        } else {
            if (*level < 1 || *level > kTreeDepth)
                throw ParseError(ln + 1, "node", "level out of range");
            const std::int32_t parent = last[static_cast<std::size_t>(*level - 1)];
            if (parent < 0) throw ParseError(ln + 1, "node", "node appears before its parent");
            const int nbins = params.bins[static_cast<std::size_t>(*level - 1)];
            if (*bin < 0 || *bin >= nbins) throw ParseError(ln + 1, "node", "bin out of range");
            if (tree.child_at(parent, static_cast<int>(*bin)) >= 0)
                throw ParseError(ln + 1, "node", "duplicate child bin");
            id = tree.ensure_child(parent, static_cast<int>(*bin));
        }
        tree.mutable_stats(id) = NodeStats{*q, *visits};
        last[static_cast<std::size_t>(*level)] = id;
        for (int deeper = static_cast<int>(*level) + 1; deeper <= kTreeDepth; ++deeper)
            last[static_cast<std::size_t>(deeper)] = -1;
        ++seen;
        ++ln;

        if (*level == kTreeDepth) continue;

        // internal node: its prospect layer line follows immediately
        const auto lt = split_ws(line_or_throw("layer"));
        if (lt.empty() || lt[0] != "l")
            throw ParseError(ln + 1, "layer", "expected prospect layer line");
        ProspectLayer& layer = tree.mutable_prospects(id);
        const std::size_t ncells = layer.cells.size();
        if (lt.size() != 1 + 3 * ncells)
            throw ParseError(ln + 1, "layer",
                             "expected " + std::to_string(ncells) + " cell triples");
        for (std::size_t c = 0; c < ncells; ++c) {
            const auto value = parse_double(lt[1 + 3 * c]);
            const auto weight = parse_double(lt[2 + 3 * c]);
            const std::string_view promoted = lt[3 + 3 * c];
            if (!value || !weight || (promoted != "0" && promoted != "1"))
                throw ParseError(ln + 1, "layer", "bad cell triple");
            layer.cells[c].value = *value;
            layer.cells[c].weight = *weight;
            layer.cells[c].promoted = promoted == "1";
        }
        ++ln;
    }

    if (seen != *declared)
        throw ParseError(lines.size() + 1, "nodes",
                         "declared " + std::to_string(*declared) + " nodes, found " +
                             std::to_string(seen));
    return tree;
}

} // namespace reachtree
