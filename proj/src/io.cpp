#include "nicholson/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace nicholson {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, std::initializer_list<const char*> allowed, const char* context) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument(std::string("unknown key \"") + item.key() + "\" in " +
                                        context);
        }
    }
}

scalar_t require_number(const json& j, const char* context) {
    if (!j.is_number()) throw std::invalid_argument(std::string(context) + " must be a number");
    return j.get<scalar_t>();
}

QuasiPeriodicSignal parse_signal(const json& j, const char* context) {
    if (j.is_number()) return QuasiPeriodicSignal(j.get<scalar_t>());
    if (!j.is_object()) {
        throw std::invalid_argument(std::string(context) +
                                    ": signal must be a number or an object");
    }
    expect_keys(j, {"constant", "terms"}, context);
    scalar_t constant = 0.0;
    if (j.contains("constant")) constant = require_number(j.at("constant"), "signal constant");
    std::vector<SignalTerm> terms;
    if (j.contains("terms")) {
        if (!j.at("terms").is_array()) {
            throw std::invalid_argument(std::string(context) + ": terms must be an array");
        }
        for (const json& tj : j.at("terms")) {
            if (!tj.is_object()) {
                throw std::invalid_argument(std::string(context) + ": term must be an object");
            }
            expect_keys(tj, {"kind", "amplitude", "frequency", "phase"}, "signal term");
            SignalTerm term;
            const std::string kind = tj.at("kind").get<std::string>();
            if (kind == "sine" || kind == "sin") {
                term.waveform = Waveform::Sine;
            } else if (kind == "cosine" || kind == "cos") {
                term.waveform = Waveform::Cosine;
            } else {
                throw std::invalid_argument("signal term kind must be sine or cosine");
            }
            term.amplitude = require_number(tj.at("amplitude"), "term amplitude");
            term.frequency = require_number(tj.at("frequency"), "term frequency");
            term.phase = tj.contains("phase") ? require_number(tj.at("phase"), "term phase") : 0.0;
            terms.push_back(term);
        }
    }
    return QuasiPeriodicSignal(constant, std::move(terms));
}

std::vector<QuasiPeriodicSignal> parse_signal_array(const json& j, int n, const char* context) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw std::invalid_argument(std::string(context) + " must be an array of n signals");
    }
    std::vector<QuasiPeriodicSignal> out;
    out.reserve(j.size());
    for (const json& sj : j) out.push_back(parse_signal(sj, context));
    return out;
}

json signal_to_json(const QuasiPeriodicSignal& s) {
    if (s.terms().empty()) return json(s.constant());
    json j;
    j["constant"] = s.constant();
    json terms = json::array();
    for (const SignalTerm& term : s.terms()) {
        json tj;
        tj["kind"] = term.waveform == Waveform::Sine ? "sine" : "cosine";
        tj["amplitude"] = term.amplitude;
        tj["frequency"] = term.frequency;
        tj["phase"] = term.phase;
        terms.push_back(tj);
    }
    j["terms"] = terms;
    return j;
}

json estimate_to_json(int block, const LyapunovEstimate& est) {
    json j;
    j["block"] = block + 1;
    j["value"] = est.value;
    j["T"] = est.T;
    j["window_slopes"] = est.window_slopes;
    j["renorm_count"] = est.renorm_count;
    j["status"] = to_string(est.status);
    j["dispersion"] = est.dispersion;
    return j;
}

std::pair<int, LyapunovEstimate> estimate_from_json(const json& j) {
    expect_keys(j, {"block", "value", "T", "window_slopes", "renorm_count", "status", "dispersion"},
                "exponent record");
    LyapunovEstimate est;
    est.value = j.at("value").get<scalar_t>();
    est.T = j.at("T").get<scalar_t>();
    est.window_slopes = j.at("window_slopes").get<std::vector<scalar_t>>();
    est.renorm_count = j.at("renorm_count").get<long>();
    est.dispersion = j.at("dispersion").get<scalar_t>();
    const std::string status = j.at("status").get<std::string>();
    est.status = status == "converged" ? ConvergenceStatus::Converged : ConvergenceStatus::Uncertain;
    return {j.at("block").get<int>() - 1, est};
}

json structure_to_json_impl(const BlockStructure& structure) {
    json j;
    auto one_based = [](const std::vector<int>& v) {
        std::vector<int> out;
        out.reserve(v.size());
        for (int x : v) out.push_back(x + 1);
        return out;
    };
    j["permutation"] = one_based(structure.permutation);
    j["block_sizes"] = structure.block_sizes;
    json blocks = json::array();
    for (const std::vector<int>& b : structure.blocks) blocks.push_back(one_based(b));
    j["blocks"] = blocks;
    j["I"] = one_based(structure.I);
    j["J"] = one_based(structure.J);
    return j;
}

BlockStructure structure_from_json_impl(const json& j) {
    expect_keys(j, {"permutation", "block_sizes", "blocks", "I", "J"}, "structure record");
    auto zero_based = [](std::vector<int> v) {
        for (int& x : v) --x;
        return v;
    };
    BlockStructure s;
    s.permutation = zero_based(j.at("permutation").get<std::vector<int>>());
    s.block_sizes = j.at("block_sizes").get<std::vector<int>>();
    for (const json& b : j.at("blocks")) s.blocks.push_back(zero_based(b.get<std::vector<int>>()));
    s.I = zero_based(j.at("I").get<std::vector<int>>());
    s.J = zero_based(j.at("J").get<std::vector<int>>());
    return s;
}

Answer answer_from_string(const std::string& s) {
    if (s == "yes") return Answer::Yes;
    if (s == "no") return Answer::No;
    if (s == "uncertain") return Answer::Uncertain;
    throw std::invalid_argument("bad answer value: " + s);
}

}  // namespace

DelaySystem parse_system(const std::string& json_text) {
    json j = json::parse(json_text);
    if (!j.is_object()) throw std::invalid_argument("system file must contain a JSON object");
    expect_keys(j, {"n", "delays", "nonlinearity", "d", "beta", "c", "a"}, "system");
    DelaySystem sys;
    if (!j.contains("n") || !j.at("n").is_number_integer()) {
        throw std::invalid_argument("system: integer field n required");
    }
    sys.n = j.at("n").get<int>();
    if (sys.n < 1) throw std::invalid_argument("system: n must be >= 1");
    if (!j.contains("delays")) throw std::invalid_argument("system: delays required");
    sys.delays = j.at("delays").get<std::vector<scalar_t>>();
    sys.d = parse_signal_array(j.at("d"), sys.n, "d");
    sys.beta = parse_signal_array(j.at("beta"), sys.n, "beta");
    if (j.contains("c")) {
        sys.c = parse_signal_array(j.at("c"), sys.n, "c");
    } else {
        sys.c.assign(static_cast<std::size_t>(sys.n), QuasiPeriodicSignal(1.0));
    }
    const json& aj = j.at("a");
    if (!aj.is_array() || static_cast<int>(aj.size()) != sys.n) {
        throw std::invalid_argument("a must be an n x n array of signals");
    }
    sys.a.reserve(static_cast<std::size_t>(sys.n) * sys.n);
    for (const json& row : aj) {
        auto signals = parse_signal_array(row, sys.n, "a row");
        for (auto& s : signals) sys.a.push_back(std::move(s));
    }
    const json& nl = j.at("nonlinearity");
    if (nl.is_string()) {
        const std::string kind = nl.get<std::string>();
        if (kind == "nicholson") {
            sys.nonlinearity.kind = NonlinearityKind::Nicholson;
        } else if (kind == "linear") {
            sys.nonlinearity.kind = NonlinearityKind::Linear;
        } else {
            throw std::invalid_argument("nonlinearity must be nicholson, linear or {mackey_glass: alpha}");
        }
    } else if (nl.is_object()) {
        expect_keys(nl, {"mackey_glass"}, "nonlinearity");
        sys.nonlinearity.kind = NonlinearityKind::MackeyGlass;
        sys.nonlinearity.alpha = require_number(nl.at("mackey_glass"), "mackey_glass alpha");
    } else {
        throw std::invalid_argument("nonlinearity must be a string or an object");
    }
    check_structure(sys);
    return sys;
}

DelaySystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open system file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

std::string system_to_json(const DelaySystem& sys) {
    json j;
    j["n"] = sys.n;
    j["delays"] = sys.delays;
    switch (sys.nonlinearity.kind) {
        case NonlinearityKind::Nicholson:
            j["nonlinearity"] = "nicholson";
            break;
        case NonlinearityKind::Linear:
            j["nonlinearity"] = "linear";
            break;
        case NonlinearityKind::MackeyGlass:
            j["nonlinearity"] = json{{"mackey_glass", sys.nonlinearity.alpha}};
            break;
    }
    auto array_of = [](const std::vector<QuasiPeriodicSignal>& sig) {
        json arr = json::array();
        for (const auto& s : sig) arr.push_back(signal_to_json(s));
        return arr;
    };
    j["d"] = array_of(sys.d);
    j["beta"] = array_of(sys.beta);
    j["c"] = array_of(sys.c);
    json a = json::array();
    for (int i = 0; i < sys.n; ++i) {
        json row = json::array();
        for (int col = 0; col < sys.n; ++col) row.push_back(signal_to_json(sys.a_at(i, col)));
        a.push_back(row);
    }
    j["a"] = a;
    return j.dump(2);
}

std::string verdict_to_json(const PersistenceVerdict& verdict) {
    json j;
    j["u0"] = to_string(verdict.u0);
    j["s0"] = to_string(verdict.s0);
    j["margin_tol"] = verdict.margin_tol;
    j["u0_margin"] = verdict.u0_margin;
    j["u0_decisive_block"] = verdict.u0_decisive_block + 1;
    j["s0_margin"] = verdict.s0_margin;
    j["s0_decisive_block"] = verdict.s0_decisive_block + 1;
    j["structure"] = structure_to_json_impl(verdict.structure);
    json exps = json::array();
    for (const auto& [block, est] : verdict.exponents) exps.push_back(estimate_to_json(block, est));
    j["exponents"] = exps;
    return j.dump(2);
}

PersistenceVerdict verdict_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    expect_keys(j,
                {"u0", "s0", "margin_tol", "u0_margin", "u0_decisive_block", "s0_margin",
                 "s0_decisive_block", "structure", "exponents"},
                "verdict record");
    PersistenceVerdict v;
    v.u0 = answer_from_string(j.at("u0").get<std::string>());
    v.s0 = answer_from_string(j.at("s0").get<std::string>());
    v.margin_tol = j.at("margin_tol").get<scalar_t>();
    v.u0_margin = j.at("u0_margin").get<scalar_t>();
    v.u0_decisive_block = j.at("u0_decisive_block").get<int>() - 1;
    v.s0_margin = j.at("s0_margin").get<scalar_t>();
    v.s0_decisive_block = j.at("s0_decisive_block").get<int>() - 1;
    v.structure = structure_from_json_impl(j.at("structure"));
    for (const json& ej : j.at("exponents")) v.exponents.insert(estimate_from_json(ej));
    return v;
}

std::string structure_to_json(const BlockStructure& structure) {
    return structure_to_json_impl(structure).dump(2);
}

BlockStructure structure_from_json(const std::string& json_text) {
    return structure_from_json_impl(json::parse(json_text));
}

std::string format_number(scalar_t v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int i = 0; i < traj.n(); ++i) os << ",y_" << (i + 1);
    os << "\n";
    for (long s = 0; s <= traj.steps(); ++s) {
        os << format_number(static_cast<scalar_t>(s) * traj.step());
        for (int i = 0; i < traj.n(); ++i) os << "," << format_number(traj.knot_values()(s, i));
        os << "\n";
    }
}

void write_exponents_csv(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents) {
    os << "block,value,status,dispersion,T,renorm_count\n";
    for (const auto& [block, est] : exponents) {
        os << (block + 1) << "," << format_number(est.value) << "," << to_string(est.status) << ","
           << format_number(est.dispersion) << "," << format_number(est.T) << ","
           << est.renorm_count << "\n";
    }
}

void write_window_slopes_csv(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents) {
    os << "block,window,slope\n";
    for (const auto& [block, est] : exponents) {
        for (std::size_t w = 0; w < est.window_slopes.size(); ++w) {
            os << (block + 1) << "," << (w + 1) << "," << format_number(est.window_slopes[w])
               << "\n";
        }
    }
}

void write_translates_csv(std::ostream& os, const std::vector<TranslateResult>& translates) {
    os << "shift,minF_secondhalf,recurrent\n";
    for (const TranslateResult& tr : translates) {
        os << format_number(tr.shift) << "," << format_number(tr.min_F_second_half) << ","
           << (tr.recurrent ? 1 : 0) << "\n";
    }
}

void write_profile_csv(std::ostream& os, const std::vector<scalar_t>& t,
                       const std::vector<scalar_t>& F) {
    os << "t,F\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << format_number(t[k]) << "," << format_number(F[k]) << "\n";
    }
}

void print_validation(std::ostream& os, const ValidationReport& report) {
    os << "hypothesis check (grid step " << report.grid_step << ", horizon " << report.horizon
       << ")\n";
    for (const HypothesisStatus& st : report.hypotheses) {
        os << "  " << to_string(st.id) << ": ";
        if (!st.applicable) {
            os << "not applicable\n";
            continue;
        }
        os << (st.pass ? "pass" : "FAIL");
        if (st.pass && st.certified_analytically) os << " (amplitude bound)";
        if (!st.pass) {
            os << "  patch " << (st.index_i + 1);
            if (st.index_j >= 0) os << " <- " << (st.index_j + 1);
            os << "  value " << st.witness_value << " at t = " << st.witness_t;
        }
        os << "\n";
    }
    if (report.status(Hypothesis::A2).pass) os << "  d0 = " << report.d0 << "\n";
    if (report.status(Hypothesis::A5).applicable && report.status(Hypothesis::A5).pass) {
        os << "  c0 = " << report.c0 << "\n";
    }
}

void print_structure(std::ostream& os, const BlockStructure& structure) {
    auto list = [&os](const char* name, const std::vector<int>& v, int offset) {
        os << name << " = {";
        for (std::size_t k = 0; k < v.size(); ++k) os << (k ? ", " : " ") << (v[k] + offset);
        os << " }\n";
    };
    list("permutation", structure.permutation, 1);
    os << "blocks (" << structure.block_count() << "):\n";
    for (int b = 0; b < structure.block_count(); ++b) {
        os << "  block " << (b + 1) << ": patches {";
        const auto& blk = structure.blocks[static_cast<std::size_t>(b)];
        for (std::size_t k = 0; k < blk.size(); ++k) os << (k ? ", " : " ") << (blk[k] + 1);
        os << " }\n";
    }
    list("I", structure.I, 1);
    list("J", structure.J, 1);
}

void print_exponents(std::ostream& os, const std::map<int, LyapunovEstimate>& exponents) {
    for (const auto& [block, est] : exponents) {
        os << "  block " << (block + 1) << ": lambda = " << format_number(est.value) << "  ["
           << to_string(est.status) << ", dispersion " << est.dispersion << ", T = " << est.T
           << ", renorms " << est.renorm_count << "]\n";
    }
}

void print_verdict(std::ostream& os, const PersistenceVerdict& verdict) {
    print_structure(os, verdict.structure);
    os << "block exponents:\n";
    print_exponents(os, verdict.exponents);
    os << "u0-persistent: " << to_string(verdict.u0) << "  (margin " << verdict.u0_margin
       << " at block " << (verdict.u0_decisive_block + 1) << ")\n";
    os << "s0-persistent: " << to_string(verdict.s0) << "  (margin " << verdict.s0_margin
       << " at block " << (verdict.s0_decisive_block + 1) << ")\n";
}

void print_empirical(std::ostream& os, const EmpiricalReport& report) {
    os << "simulation tails over [T-W, T] = [" << (report.T - report.W) << ", " << report.T
       << "]\n";
    for (std::size_t k = 0; k < report.histories.size(); ++k) {
        const HistoryReport& hr = report.histories[k];
        os << "  history " << (k + 1) << (hr.strongly_positive_start ? " (phi(0) >> 0)" : "")
           << ": u0 witness " << format_number(hr.u0_witness) << ", s0 witness "
           << format_number(hr.s0_witness);
        if (hr.clamp_events > 0) {
            os << ", clamps " << hr.clamp_events << " (max " << hr.max_clamp_magnitude << ")";
        }
        os << "\n";
        os << "    tail min per patch:";
        for (scalar_t v : hr.tail_min) os << " " << format_number(v);
        os << "\n";
    }
    if (report.verdict.has_value()) {
        os << "verdict cross-check: " << to_string(report.consistency) << " (u0 "
           << to_string(report.verdict->u0) << ", s0 " << to_string(report.verdict->s0) << ")\n";
    }
}

void print_hull_demo(std::ostream& os, const HullDemoReport& report) {
    os << "hull translation demo: f = truncated zero-mean sum, N = " << report.N
       << ", T = " << report.T << ", tol = " << report.recurrence_tol << "\n";
    os << "  base min F over [1, T]: " << format_number(report.base_min_positive_range) << "\n";
    os << "  base F(T): " << format_number(report.base_F.back()) << "\n";
    os << "  per-term sup bound for F at this truncation: "
       << format_number(conley_miller_integral_sup_bound(report.N))
       << " (grows without bound in N)\n";
    os << "  translates flagged recurrent: " << report.recurrent_fraction * 100.0 << "% of "
       << report.translates.size() << "\n";
}

void print_scalar_criterion(std::ostream& os, const ScalarCriterionReport& report) {
    os << "scalar criterion: F(t) = integral of a over [0, t]\n";
    os << "  checkpoints: " << report.checkpoints.size() << ", F(end) = "
       << format_number(report.F.back()) << "\n";
    os << "  min over last half: " << format_number(report.min_last_half)
       << ", fitted slope: " << format_number(report.ls_slope) << "\n";
    os << "  verdict: " << to_string(report.verdict) << "\n";
}

}  // namespace nicholson
