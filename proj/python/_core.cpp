#include "consicore/pipeline.hpp"
#include "consicore/serialize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace consicore;

namespace {

ir::MiniApp parse_or_raise(const std::string &source)
{
    try {
        return ir::parse_app(source);
    } catch (const ir::ParseError &e) {
        throw py::value_error(std::to_string(e.pos().line) + ":" + std::to_string(e.pos().column) + ": " +
                              e.detail());
    }
}

std::string analyze(const std::string &source, const std::string &strategy, int max_paths, std::uint64_t seed,
    bool first_hit, std::int64_t int_bound, int str_maxlen, const std::string &nonlinear,
    const std::optional<std::string> &db, const std::string &payload)
{
    auto app = parse_or_raise(source);
    pipeline::AnalyzeOptions opt;
    opt.search.strategy = engine::parse_strategy(strategy);
    opt.search.max_paths = max_paths;
    opt.search.seed = seed;
    opt.search.first_hit = first_hit;
    opt.search.solver.int_bound = int_bound;
    opt.search.solver.str_maxlen = str_maxlen;
    if (nonlinear != "reject" && nonlinear != "enumerate")
        throw py::value_error("nonlinear must be 'reject' or 'enumerate'");
    opt.search.solver.nonlinear = nonlinear == "enumerate" ? sym::Nonlinear::Enumerate : sym::Nonlinear::Reject;
    if (db)
        opt.db = sql::MiniDb::from_json(*db);
    opt.replay.payload = payload;

    pipeline::AppAnalysis a;
    {
        py::gil_scoped_release release;
        a = pipeline::analyze_app(app, opt);
    }
    io::Json j{{"app", a.app}, {"skipped", a.skipped}, {"notes", a.notes},
        {"drivers", io::drivers_json(a.stat.drivers)}, {"stacks", io::stacks_json(a.stat.stacks)}};
    io::Json runs = io::Json::array();
    for (const auto &r : a.runs) {
        io::Json e{{"driver", r.driver}};
        e.update(io::to_json(r.exploration, false));
        runs.push_back(std::move(e));
    }
    j["explorations"] = runs;
    io::Json reports = io::Json::array(), texts = io::Json::array(), replays = io::Json::array();
    for (const auto &r : a.reports) {
        reports.push_back(io::to_json(r));
        texts.push_back(taint::render_report_text(r));
    }
    for (const auto &o : a.replays)
        replays.push_back(io::to_json(o));
    j["reports"] = reports;
    j["report_texts"] = texts;
    j["replays"] = replays;
    auto first = a.paths_until_first_detection();
    j["paths_until_first_detection"] = first ? io::Json(*first) : io::Json();
    j["coverage"] = a.coverage();
    return j.dump();
}

std::string replay_report(const std::string &source, const std::string &report_json, const std::string &db_json,
    const std::string &payload, bool payload_all)
{
    auto app = parse_or_raise(source);
    auto report = io::report_from_json(io::Json::parse(report_json));
    auto stat = analysis::analyze_static(app);
    if (report.driver < 0 || static_cast<std::size_t>(report.driver) >= stat.drivers.size())
        throw py::value_error("report names a driver the app does not have");
    auto db = sql::MiniDb::from_json(db_json);
    auto out = replay::replay(app, stat.drivers[static_cast<std::size_t>(report.driver)], report, db,
        {payload, payload_all});
    return io::to_json(out).dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Native core: mini-app parsing, concolic analysis and exploit replay";

    py::register_exception<sql::SqlError>(m, "SqlError", PyExc_ValueError);
    py::register_exception<replay::ReplayError>(m, "ReplayError", PyExc_ValueError);
    py::register_exception<io::FormatError>(m, "FormatError", PyExc_ValueError);

    m.def("format_app", [](const std::string &source) { return ir::print_app(parse_or_raise(source)); },
        py::arg("source"), "Parse an app and return its canonical source text.");
    m.def("analyze", &analyze, py::arg("source"), py::arg("strategy") = "guided", py::arg("max_paths") = 256,
        py::arg("seed") = 0, py::arg("first_hit") = false, py::arg("int_bound") = 1000, py::arg("str_maxlen") = 16,
        py::arg("nonlinear") = "reject", py::arg("db") = py::none(), py::arg("payload") = replay::kDefaultPayload,
        "Run the full pipeline on app source text; returns JSON.");
    m.def("replay", &replay_report, py::arg("source"), py::arg("report"), py::arg("db"),
        py::arg("payload") = replay::kDefaultPayload, py::arg("payload_all") = false,
        "Replay a report (JSON) against a database fixture (JSON); returns JSON.");
    m.def("parse_query", [](const std::string &q) { return sql::to_string(sql::parse_query(q)); }, py::arg("query"));
    m.attr("DEFAULT_PAYLOAD") = replay::kDefaultPayload;
}
