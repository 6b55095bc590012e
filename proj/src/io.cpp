#include "sotest/io.hpp"

#include "sotest/errors.hpp"

namespace sotest {

namespace {

jsn encode_range(const IntRange& r) { return jsn::array({r.lo, r.hi}); }
jsn encode_range(const RealRange& r) { return jsn::array({r.lo, r.hi}); }

IntRange int_range(const jsn& j, IntRange dflt) {
    if (j.is_null()) return dflt;
    return IntRange{j.at(0).get<int>(), j.at(1).get<int>()};
}

RealRange real_range(const jsn& j, RealRange dflt) {
    if (j.is_null()) return dflt;
    return RealRange{j.at(0).get<double>(), j.at(1).get<double>()};
}

jsn encode(const InfluenceFunction& f) {
    jsn rows = jsn::array();
    for (const auto& [key, delta] : f.table)
        rows.push_back(jsn{{"type", key.first}, {"state", key.second}, {"delta", delta}});
    return rows;
}

InfluenceFunction decode_influence(const jsn& j) {
    InfluenceFunction f;
    for (const auto& row : j)
        f.table[{row.at("type").get<std::string>(), row.at("state").get<std::string>()}] =
            row.at("delta").get<double>();
    return f;
}

jsn encode(const Partition& p) {
    jsn j{{"members", p.members}};
    j["leader"] = p.leader ? jsn(*p.leader) : jsn(nullptr);
    return j;
}

Partition decode_partition(const jsn& j) {
    Partition p;
    p.members = j.at("members").get<std::vector<AgentId>>();
    if (!j.at("leader").is_null()) p.leader = j.at("leader").get<AgentId>();
    return p;
}

}  // namespace

jsn encode(const EnvironmentProfile& ep) {
    return jsn{{"states", ep.states}, {"initial", ep.initial_state}, {"matrix", ep.transitions}};
}

EnvironmentProfile decode_profile(const jsn& j) {
    EnvironmentProfile ep;
    ep.states = j.at("states").get<std::vector<std::string>>();
    ep.initial_state = j.at("initial").get<int>();
    ep.transitions = j.at("matrix").get<std::vector<std::vector<double>>>();
    return ep;
}

jsn encode(const Partitioning& p) {
    jsn parts = jsn::array();
    for (const auto& part : p.partitions) parts.push_back(encode(part));
    return jsn{{"partitions", parts}};
}

Partitioning decode_partitioning(const jsn& j) {
    Partitioning p;
    for (const auto& part : j.at("partitions")) p.partitions.push_back(decode_partition(part));
    return p;
}

jsn encode(const SystemStructure& s) {
    jsn assignment = jsn::array();
    for (const auto& [agent, avpp] : s.assignment) assignment.push_back(jsn::array({agent, avpp}));
    jsn avpps = jsn::array();
    for (const auto& [id, part] : s.avpps) avpps.push_back(jsn::array({id, encode(part)}));
    return jsn{{"assignment", assignment}, {"avpps", avpps}, {"next_avpp_id", s.next_avpp_id}};
}

SystemStructure decode_structure(const jsn& j) {
    SystemStructure s;
    for (const auto& row : j.at("assignment"))
        s.assignment[row.at(0).get<AgentId>()] = row.at(1).get<int>();
    for (const auto& row : j.at("avpps"))
        s.avpps[row.at(0).get<int>()] = decode_partition(row.at(1));
    s.next_avpp_id = j.at("next_avpp_id").get<int>();
    return s;
}

jsn encode(const SystemConfiguration& c) {
    jsn agents = jsn::array();
    for (const auto& a : c.agents)
        agents.push_back(jsn{{"id", a.id},
                             {"type", a.type},
                             {"group", a.group_id},
                             {"accuracy", a.prediction_accuracy}});
    jsn groups = jsn::array();
    for (const auto& g : c.groups)
        groups.push_back(jsn{{"id", g.id},
                             {"members", g.member_ids},
                             {"profile", encode(g.profile)},
                             {"influence", encode(g.influence)}});
    jsn j{{"agents", agents},
          {"groups", groups},
          {"structure", encode(c.initial_structure)},
          {"constraints",
           jsn{{"s_min", c.constraints.s_min},
               {"s_max", c.constraints.s_max},
               {"n_min", c.constraints.n_min},
               {"n_max", c.constraints.n_max}}},
          {"theta", c.trigger.dissimilarity_threshold},
          {"algorithm", to_string(c.algorithm)}};
    j["spada"] = c.spada ? jsn{{"acquaintances", c.spada->acquaintances},
                               {"evaluated_per_round", c.spada->evaluated_per_round},
                               {"max_integrations", c.spada->max_integrations}}
                         : jsn(nullptr);
    j["psopp"] = c.psopp ? jsn{{"particles", c.psopp->particles},
                               {"start_at_current", c.psopp->start_at_current},
                               {"c_random", c.psopp->c_random},
                               {"c_pbest", c.psopp->c_pbest},
                               {"c_gbest", c.psopp->c_gbest},
                               {"max_runtime_seconds", c.psopp->max_runtime_seconds}}
                         : jsn(nullptr);
    j["master_seed"] = c.master_seed;
    return j;
}

SystemConfiguration decode_config(const jsn& j) {
    SystemConfiguration c;
    for (const auto& row : j.at("agents")) {
        Agent a;
        a.id = row.at("id").get<AgentId>();
        a.type = row.at("type").get<std::string>();
        a.group_id = row.at("group").get<int>();
        a.prediction_accuracy = row.at("accuracy").get<double>();
        c.agents.push_back(a);
    }
    for (const auto& row : j.at("groups")) {
        AgentGroup g;
        g.id = row.at("id").get<int>();
        g.member_ids = row.at("members").get<std::vector<AgentId>>();
        g.profile = decode_profile(row.at("profile"));
        g.influence = decode_influence(row.at("influence"));
        c.groups.push_back(g);
    }
    c.initial_structure = decode_structure(j.at("structure"));
    const jsn& cs = j.at("constraints");
    c.constraints = PartitioningConstraints{cs.at("s_min").get<int>(), cs.at("s_max").get<int>(),
                                            cs.at("n_min").get<int>(), cs.at("n_max").get<int>()};
    c.trigger.dissimilarity_threshold = j.at("theta").get<double>();
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    if (!j.at("spada").is_null()) {
        const jsn& sp = j.at("spada");
        c.spada = SpadaParams{sp.at("acquaintances").get<int>(),
                              sp.at("evaluated_per_round").get<int>(),
                              sp.at("max_integrations").get<int>()};
    }
    if (!j.at("psopp").is_null()) {
        const jsn& pp = j.at("psopp");
        PsoppParams p;
        p.particles = pp.at("particles").get<int>();
        p.start_at_current = pp.at("start_at_current").get<int>();
        p.c_random = pp.at("c_random").get<double>();
        p.c_pbest = pp.at("c_pbest").get<double>();
        p.c_gbest = pp.at("c_gbest").get<double>();
        p.max_runtime_seconds = pp.at("max_runtime_seconds").get<double>();
        c.psopp = p;
    }
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

jsn encode(const TestSuite& s) {
    jsn sequences = jsn::array();
    for (const auto& seq : s.sequences) {
        jsn cases = jsn::array();
        for (const auto& tc : seq.cases) {
            jsn states = jsn::array();
            for (const auto& [gid, state] : tc.group_state)
                states.push_back(jsn::array({gid, state}));
            cases.push_back(jsn{{"i", tc.step_index}, {"s", states}});
        }
        sequences.push_back(jsn{{"seed", seq.seed}, {"cases", cases}});
    }
    return jsn{{"id", s.id}, {"config", encode(s.config)}, {"sequences", sequences}};
}

TestSuite decode_suite(const jsn& j) {
    TestSuite s;
    s.id = j.at("id").get<std::uint64_t>();
    s.config = decode_config(j.at("config"));
    for (const auto& row : j.at("sequences")) {
        TestSequence seq;
        seq.seed = row.at("seed").get<std::uint64_t>();
        for (const auto& cj : row.at("cases")) {
            TestCase tc;
            tc.step_index = cj.at("i").get<int>();
            for (const auto& pair : cj.at("s"))
                tc.group_state[pair.at(0).get<int>()] = pair.at(1).get<int>();
            seq.cases.push_back(std::move(tc));
        }
        s.sequences.push_back(std::move(seq));
    }
    return s;
}

// -- suite files -------------------------------------------------------------

void write_suites(const std::string& path, const SuiteFileMeta& meta,
                  const std::vector<TestSuite>& suites) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    jsn header{{"schema", kSuiteSchema},
               {"seed", meta.seed},
               {"algorithm", to_string(meta.algorithm)}};
    header["fault"] = meta.fault ? jsn(to_string(*meta.fault)) : jsn(nullptr);
    header["count"] = static_cast<int>(suites.size());
    out << header.dump() << '\n';
    for (const auto& s : suites) out << encode(s).dump() << '\n';
    if (!out) throw IoError("write failed: " + path);
}

std::vector<TestSuite> read_suites(const std::string& path, SuiteFileMeta* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty suite file: " + path);
    jsn header = jsn::parse(line);
    if (header.value("schema", std::string()) != kSuiteSchema)
        throw IoError("not a suite file (schema mismatch): " + path);
    if (meta) {
        meta->seed = header.at("seed").get<std::uint64_t>();
        meta->algorithm = algorithm_from_string(header.at("algorithm").get<std::string>());
        if (!header.at("fault").is_null())
            meta->fault = fault_from_string(header.at("fault").get<std::string>());
        meta->count = header.at("count").get<int>();
    }
    std::vector<TestSuite> suites;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        suites.push_back(decode_suite(jsn::parse(line)));
    }
    return suites;
}

// -- result files ------------------------------------------------------------

ResultWriter::ResultWriter(const std::string& path, const ResultHeader& header)
    : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
    jsn j{{"schema", kResultSchema},
          {"seed", header.seed},
          {"mode", to_string(header.mode)},
          {"algorithm", to_string(header.algorithm)}};
    j["fault"] = header.fault ? jsn(to_string(*header.fault)) : jsn(nullptr);
    j["suites"] = header.suites;
    j["sequences"] = header.sequences;
    out_ << j.dump() << '\n';
}

void ResultWriter::write(const SuiteRecord& r) {
    jsn j{{"record", "suite"},
          {"suite", r.suite},
          {"agents", r.agents},
          {"groups", r.groups},
          {"ep_states_mean", r.ep_states_mean},
          {"ep_transitions_mean", r.ep_transitions_mean}};
    out_ << j.dump() << '\n';
}

void ResultWriter::write(const StepRecord& r) {
    jsn states = jsn::object();
    for (const auto& [group, state] : r.states) states[std::to_string(group)] = state;
    jsn j{{"record", "step"},       {"suite", r.suite},
          {"seq", r.seq},           {"depth", r.depth},
          {"states", states},       {"triggered", r.triggered},
          {"gray", r.gray_violations}, {"black", r.black_violations},
          {"smoke", r.smoke},       {"activations", r.activations},
          {"compute_seconds", r.compute_seconds}};
    out_ << j.dump() << '\n';
}

void ResultWriter::write(const SequenceRecord& r) {
    jsn j{{"record", "sequence"},
          {"suite", r.suite},
          {"seq", r.seq},
          {"status", r.status},
          {"cases", r.cases},
          {"applied", r.applied},
          {"reorgs", r.reorgs},
          {"gray_steps", r.gray_steps},
          {"black_steps", r.black_steps},
          {"smoke", r.smoke},
          {"first_gray", r.first_gray},
          {"first_black", r.first_black},
          {"first_fail", r.first_fail},
          {"activations", r.activations},
          {"masked_activations", r.masked_activations},
          {"state_coverage", r.state_coverage},
          {"transition_coverage", r.transition_coverage}};
    out_ << j.dump() << '\n';
}

ResultFile read_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty result file: " + path);
    jsn header = jsn::parse(line);
    if (header.value("schema", std::string()) != kResultSchema)
        throw IoError("not a result file (schema mismatch): " + path);

    ResultFile f;
    f.header.seed = header.at("seed").get<std::uint64_t>();
    f.header.mode = suite_mode_from_string(header.at("mode").get<std::string>());
    f.header.algorithm = algorithm_from_string(header.at("algorithm").get<std::string>());
    if (!header.at("fault").is_null())
        f.header.fault = fault_from_string(header.at("fault").get<std::string>());
    f.header.suites = header.at("suites").get<int>();
    f.header.sequences = header.at("sequences").get<int>();

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        jsn j = jsn::parse(line);
        const std::string kind = j.at("record").get<std::string>();
        if (kind == "suite") {
            SuiteRecord r;
            r.suite = j.at("suite").get<int>();
            r.agents = j.at("agents").get<int>();
            r.groups = j.at("groups").get<int>();
            r.ep_states_mean = j.at("ep_states_mean").get<double>();
            r.ep_transitions_mean = j.at("ep_transitions_mean").get<double>();
            f.suites.push_back(r);
        } else if (kind == "step") {
            StepRecord r;
            r.suite = j.at("suite").get<int>();
            r.seq = j.at("seq").get<int>();
            r.depth = j.at("depth").get<int>();
            for (const auto& [key, value] : j.at("states").items())
                r.states[std::stoi(key)] = value.get<int>();
            r.triggered = j.at("triggered").get<bool>();
            r.gray_violations = j.at("gray").get<int>();
            r.black_violations = j.at("black").get<int>();
            r.smoke = j.at("smoke").get<bool>();
            r.activations = j.at("activations").get<long long>();
            r.compute_seconds = j.at("compute_seconds").get<double>();
            f.steps.push_back(r);
        } else if (kind == "sequence") {
            SequenceRecord r;
            r.suite = j.at("suite").get<int>();
            r.seq = j.at("seq").get<int>();
            r.status = j.at("status").get<std::string>();
            r.cases = j.at("cases").get<int>();
            r.applied = j.at("applied").get<int>();
            r.reorgs = j.at("reorgs").get<int>();
            r.gray_steps = j.at("gray_steps").get<int>();
            r.black_steps = j.at("black_steps").get<int>();
            r.smoke = j.at("smoke").get<bool>();
            r.first_gray = j.at("first_gray").get<int>();
            r.first_black = j.at("first_black").get<int>();
            r.first_fail = j.at("first_fail").get<int>();
            r.activations = j.at("activations").get<long long>();
            r.masked_activations = j.at("masked_activations").get<long long>();
            r.state_coverage = j.at("state_coverage").get<double>();
            r.transition_coverage = j.at("transition_coverage").get<double>();
            f.sequences.push_back(r);
        } else {
            throw IoError("unknown record kind: " + kind);
        }
    }
    return f;
}

// -- campaign configuration ---------------------------------------------------

jsn encode(const CampaignConfig& c) {
    jsn j{
        {"model",
         jsn{{"agents", encode_range(c.model.agents)},
             {"cases_per_sequence", encode_range(c.model.cases_per_sequence)},
             {"ep_states", encode_range(c.model.ep_states)},
             {"influence_delta", encode_range(c.model.influence_delta)},
             {"sequences_per_suite", c.model.sequences_per_suite},
             {"theta", c.model.theta},
             {"force_equal_partition_count", c.model.force_equal_partition_count},
             {"spada_acquaintances", encode_range(c.model.spada_acquaintances)},
             {"spada_evaluated", encode_range(c.model.spada_evaluated)},
             {"spada_integrations", encode_range(c.model.spada_integrations)},
             {"psopp_particles", encode_range(c.model.psopp_particles)},
             {"psopp_runtime", encode_range(c.model.psopp_runtime)}}},
        {"faults",
         jsn{{"t1", c.faults.t1},
             {"t2", c.faults.t2},
             {"spada_f1_avpp_count", c.faults.spada_f1_avpp_count},
             {"spada_f2_avpp_count", c.faults.spada_f2_avpp_count},
             {"spada_partition_size", c.faults.spada_partition_size}}},
        {"engine",
         jsn{{"smoke_runtime_factor", c.engine.smoke_runtime_factor},
             {"seconds_per_iteration", c.seconds_per_iteration}}},
        {"campaign", jsn{{"suites", c.suites}}},
    };
    // authored environment dynamics are optional; absent keys mean "sample"
    if (!c.model.fixed_profiles.empty()) {
        jsn eps = jsn::array();
        for (const auto& ep : c.model.fixed_profiles) eps.push_back(encode(ep));
        j["model"]["profiles"] = eps;
    }
    if (c.model.fixed_influence) j["model"]["influence"] = encode(*c.model.fixed_influence);
    return j;
}

CampaignConfig campaign_config_from_json(const jsn& j) {
    CampaignConfig c;
    const jsn model = j.value("model", jsn::object());
    c.model.agents = int_range(model.value("agents", jsn()), c.model.agents);
    c.model.cases_per_sequence =
        int_range(model.value("cases_per_sequence", jsn()), c.model.cases_per_sequence);
    c.model.ep_states = int_range(model.value("ep_states", jsn()), c.model.ep_states);
    c.model.influence_delta =
        real_range(model.value("influence_delta", jsn()), c.model.influence_delta);
    c.model.sequences_per_suite = model.value("sequences_per_suite", c.model.sequences_per_suite);
    c.model.theta = model.value("theta", c.model.theta);
    c.model.force_equal_partition_count =
        model.value("force_equal_partition_count", c.model.force_equal_partition_count);
    c.model.spada_acquaintances =
        int_range(model.value("spada_acquaintances", jsn()), c.model.spada_acquaintances);
    c.model.spada_evaluated =
        int_range(model.value("spada_evaluated", jsn()), c.model.spada_evaluated);
    c.model.spada_integrations =
        int_range(model.value("spada_integrations", jsn()), c.model.spada_integrations);
    c.model.psopp_particles =
        int_range(model.value("psopp_particles", jsn()), c.model.psopp_particles);
    c.model.psopp_runtime = real_range(model.value("psopp_runtime", jsn()), c.model.psopp_runtime);
    if (model.contains("profiles")) {
        for (const auto& ep : model.at("profiles")) {
            EnvironmentProfile p = decode_profile(ep);
            Verdict v = validate_profile(p);
            if (!v.passed) throw ConfigError("config profile is not a valid environment profile");
            c.model.fixed_profiles.push_back(std::move(p));
        }
    }
    if (model.contains("influence"))
        c.model.fixed_influence = decode_influence(model.at("influence"));

    const jsn faults = j.value("faults", jsn::object());
    c.faults.t1 = faults.value("t1", c.faults.t1);
    c.faults.t2 = faults.value("t2", c.faults.t2);
    c.faults.spada_f1_avpp_count = faults.value("spada_f1_avpp_count", c.faults.spada_f1_avpp_count);
    c.faults.spada_f2_avpp_count = faults.value("spada_f2_avpp_count", c.faults.spada_f2_avpp_count);
    c.faults.spada_partition_size =
        faults.value("spada_partition_size", c.faults.spada_partition_size);

    const jsn engine = j.value("engine", jsn::object());
    c.engine.smoke_runtime_factor =
        engine.value("smoke_runtime_factor", c.engine.smoke_runtime_factor);
    c.seconds_per_iteration = engine.value("seconds_per_iteration", c.seconds_per_iteration);

    const jsn campaign = j.value("campaign", jsn::object());
    c.suites = campaign.value("suites", c.suites);
    return c;
}

CampaignConfig load_campaign_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    jsn j;
    try {
        j = jsn::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return campaign_config_from_json(j);
}

void save_campaign_config(const std::string& path, const CampaignConfig& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << encode(c).dump(2) << '\n';
}

}  // namespace sotest
