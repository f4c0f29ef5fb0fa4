#include <fstream>
#include <string>

#include "cardest/errors.hpp"
#include "cardest/graph.hpp"
#include "json_util.hpp"

namespace cardest {

using detail::json;

namespace {

ElementRecord parse_record(const std::string& line, std::size_t lineno, bool edge) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw ParseError("record must be an object", lineno);
    auto str = [&](const char* f) {
        if (!j.contains(f) || !j[f].is_string()) throw ParseError(std::string("missing string field '") + f + "'", lineno);
        return j[f].get<std::string>();
    };
    ElementRecord r;
    r.id = str("id");
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) throw ParseError("'labels' must be a list", lineno);
        for (const auto& l : j["labels"]) {
            if (!l.is_string()) throw ParseError("labels must be strings", lineno);
            r.labels.push_back(l.get<std::string>());
        }
    }
    if (j.contains("props")) {
        if (!j["props"].is_object()) throw ParseError("'props' must be an object", lineno);
        for (const auto& [k, v] : j["props"].items()) {
            if (v.is_null()) continue;
            r.props.emplace(k, detail::scalar_from_json(v, lineno));
        }
    }
    if (edge) {
        r.src = str("src");
        r.trg = str("trg");
    }
    return r;
}

template <typename F>
void read_lines(const std::filesystem::path& p, F&& f) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        f(line, lineno);
    }
}

json record_json(const ElementRecord& r, bool edge) {
    json j = {{"id", r.id}, {"labels", r.labels}};
    json props = json::object();
    for (const auto& [k, v] : r.props) props[k] = detail::scalar_to_json(v);
    j["props"] = props;
    if (edge) {
        j["src"] = r.src;
        j["trg"] = r.trg;
    }
    return j;
}

}  // namespace

PropertyGraph load_graph(const std::filesystem::path& vertex_file, const std::filesystem::path& edge_file) {
    PropertyGraph::Builder b;
    read_lines(vertex_file, [&](const std::string& line, std::size_t n) {
        try {
            b.add_vertex(parse_record(line, n, false));
        } catch (const IntegrityError& e) {
            throw IntegrityError(std::string(e.what()) + " (" + vertex_file.string() + " line " + std::to_string(n) + ")");
        }
    });
    read_lines(edge_file, [&](const std::string& line, std::size_t n) {
        try {
            b.add_edge(parse_record(line, n, true));
        } catch (const IntegrityError& e) {
            throw IntegrityError(std::string(e.what()) + " (" + edge_file.string() + " line " + std::to_string(n) + ")");
        }
    });
    return std::move(b).build();
}

PropertyGraph load_graph_dir(const std::filesystem::path& dir) {
    return load_graph(dir / "vertices.jsonl", dir / "edges.jsonl");
}

void save_graph(const PropertyGraph& g, const std::filesystem::path& vertex_file, const std::filesystem::path& edge_file) {
    std::ofstream vs(vertex_file), es(edge_file);
    if (!vs || !es) throw Error("cannot write graph files");
    for (ElementId id = 0; id < g.num_ids(); ++id) {
        bool edge = g.is_edge(id);
        (edge ? es : vs) << record_json(g.record(id), edge).dump() << '\n';
    }
}

void save_graph_dir(const PropertyGraph& g, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_graph(g, dir / "vertices.jsonl", dir / "edges.jsonl");
}

}  // namespace cardest
