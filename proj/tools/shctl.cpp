// shctl: scriptable mobile client for the smart house gateway.

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/stat.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smarthouse/client.hpp"
#include "smarthouse/records.hpp"

namespace {

using namespace smarthouse;
using client::ClientSession;

struct Settings {
    std::string config_path;
    std::string server = "127.0.0.1:8080";
    std::string user;
    std::string password;
    std::string client_id;
    std::string special_code;
    std::string shared_secret;
    double staleness = 10.0;
};

/// Fills unset fields from the JSON config. The file carries the shared
/// secret, so it must not be readable by group or others.
void load_config(Settings& s, bool server_given, bool user_given, bool client_given) {
    if (s.config_path.empty()) return;
    struct stat st{};
    if (::stat(s.config_path.c_str(), &st) != 0) throw client::ValidationError("cannot stat " + s.config_path);
    if (st.st_mode & (S_IRWXG | S_IRWXO))
        throw client::ValidationError(s.config_path + " is accessible by group/others; chmod 600 it");
    std::ifstream in(s.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const std::exception& e) {
        throw client::ValidationError(s.config_path + ": " + e.what());
    }
    if (!server_given && j.contains("server")) s.server = j["server"].get<std::string>();
    if (!user_given && j.contains("user")) s.user = j["user"].get<std::string>();
    if (!client_given && j.contains("client_id")) s.client_id = j["client_id"].get<std::string>();
    if (s.special_code.empty() && j.contains("special_code")) s.special_code = j["special_code"].get<std::string>();
    if (s.shared_secret.empty() && j.contains("shared_secret")) s.shared_secret = j["shared_secret"].get<std::string>();
}

std::string password_from_env_or_stdin() {
    if (const char* env = std::getenv("SMARTHOUSE_PASSWORD")) return env;
    std::string line;
    std::getline(std::cin, line);
    return line;
}

void print_states(const ClientSession& session) {
    for (const auto& st : session.states()) std::printf("%s\n", records::format_state(st).c_str());
}

template <typename T>
T parse_record(T (*parse)(std::string_view), const std::string& line) {
    try {
        return parse(line);
    } catch (const records::RecordError& e) {
        throw client::ValidationError(e.what());
    }
}

struct ScheduleArgs {
    std::string id, name, action, arg, when = "now", criteria;
    Oid oid = 0;
    bool disabled = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--id", id, "Client-chosen record id")->required();
        cmd->add_option("--name", name)->required();
        cmd->add_option("--oid", oid)->required();
        cmd->add_option("--action", action)->required();
        cmd->add_option("--arg", arg);
        cmd->add_option("--when", when, "now or hh:mm");
        cmd->add_option("--criteria", criteria, "oid:field:cmp:operand,...");
        cmd->add_flag("--disabled", disabled);
    }
    ScheduledTask task() const {
        ScheduledTask t;
        t.id = id;
        t.name = name;
        t.action = {oid, action, arg};
        t.when = parse_record(&records::parse_when, when);
        t.criteria = parse_record(&records::parse_conditions, criteria);
        t.enabled = !disabled;
        return t;
    }
};

struct RuleArgs {
    std::string id, name, conditions, actions;
    bool disabled = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--id", id, "Client-chosen record id")->required();
        cmd->add_option("--name", name)->required();
        cmd->add_option("--conditions", conditions, "oid:field:cmp:operand,...")->required();
        cmd->add_option("--actions", actions, "oid:action:arg,...")->required();
        cmd->add_flag("--disabled", disabled);
    }
    Rule rule() const {
        Rule r;
        r.id = id;
        r.name = name;
        r.conditions = parse_record(&records::parse_conditions, conditions);
        r.actions = parse_record(&records::parse_action_calls, actions);
        r.enabled = !disabled;
        if (r.conditions.empty() || r.actions.empty()) throw client::ValidationError("rule needs conditions and actions");
        return r;
    }
};

struct EnableArgs {
    std::string id;
    int enabled = 1;
    void attach(CLI::App* cmd) {
        cmd->add_option("id", id)->required();
        cmd->add_option("enabled", enabled, "1 or 0")->required()->check(CLI::IsMember({0, 1}));
    }
};

struct CommandArgs {
    Oid oid = 0;
    std::string action, arg;
    void attach(CLI::App* cmd) {
        cmd->add_option("oid", oid)->required();
        cmd->add_option("action", action)->required();
        cmd->add_option("arg", arg);
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart house mobile client"};
    app.require_subcommand(1);

    Settings s;
    auto* opt_server = app.add_option("--server", s.server, "Gateway address host:port");
    auto* opt_user = app.add_option("--user", s.user);
    auto* opt_client = app.add_option("--client-id", s.client_id);
    app.add_option("--staleness", s.staleness, "Seconds before cached state is refreshed");
    app.add_option("--config", s.config_path, "JSON with server, user, client_id, special_code, shared_secret");
    app.add_option("--password", s.password, "Defaults to $SMARTHOUSE_PASSWORD, then a line on stdin");

    auto* login = app.add_subcommand("login", "Handshake and authenticate");
    auto* devices = app.add_subcommand("devices", "List the device table");
    auto* state = app.add_subcommand("state", "Show device states");
    auto* map_cmd = app.add_subcommand("map", "Render the floor plan as text");

    auto* cmd = app.add_subcommand("cmd", "Send a command to an actuator");
    CommandArgs cmd_args;
    cmd_args.attach(cmd);

    auto* sched = app.add_subcommand("sched", "Manage scheduled tasks");
    sched->require_subcommand(1);
    auto* sched_list = sched->add_subcommand("list");
    auto* sched_put = sched->add_subcommand("put");
    auto* sched_enable = sched->add_subcommand("enable");
    ScheduleArgs sched_args;
    EnableArgs sched_enable_args;
    sched_args.attach(sched_put);
    sched_enable_args.attach(sched_enable);

    auto* rule = app.add_subcommand("rule", "Manage rules");
    rule->require_subcommand(1);
    auto* rule_list = rule->add_subcommand("list");
    auto* rule_put = rule->add_subcommand("put");
    auto* rule_enable = rule->add_subcommand("enable");
    RuleArgs rule_args;
    EnableArgs rule_enable_args;
    rule_args.attach(rule_put);
    rule_enable_args.attach(rule_enable);

    auto* sms = app.add_subcommand("sms", "Send a mutating request over the SMS channel");
    sms->require_subcommand(1);
    auto* sms_cmd = sms->add_subcommand("cmd");
    auto* sms_sched_put = sms->add_subcommand("sched-put");
    auto* sms_sched_enable = sms->add_subcommand("sched-enable");
    auto* sms_rule_put = sms->add_subcommand("rule-put");
    auto* sms_rule_enable = sms->add_subcommand("rule-enable");
    CommandArgs sms_cmd_args;
    ScheduleArgs sms_sched_args;
    EnableArgs sms_sched_enable_args;
    RuleArgs sms_rule_args;
    EnableArgs sms_rule_enable_args;
    sms_cmd_args.attach(sms_cmd);
    sms_sched_args.attach(sms_sched_put);
    sms_sched_enable_args.attach(sms_sched_enable);
    sms_rule_args.attach(sms_rule_put);
    sms_rule_enable_args.attach(sms_rule_enable);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? client::kExitOk : client::kExitValidation;
    }

    try {
        load_config(s, opt_server->count() > 0, opt_user->count() > 0, opt_client->count() > 0);
        if (s.user.empty()) throw client::ValidationError("--user is required");
        if (s.special_code.empty() || s.shared_secret.empty())
            throw client::ValidationError("special_code and shared_secret must come from --config");
        if (s.password.empty()) s.password = password_from_env_or_stdin();

        client::ClientConfig cc;
        if (!s.client_id.empty()) cc.client_id = s.client_id;
        cc.username = s.user;
        cc.special_code = s.special_code;
        cc.shared_secret = s.shared_secret;
        cc.staleness = std::chrono::milliseconds(static_cast<std::int64_t>(s.staleness * 1000));

        client::HttpTransport transport(s.server);
        auto session = ClientSession::login(transport, cc, std::move(s.password));

        if (*login) {
            std::printf("OK logged in as %s\n", cc.username.c_str());
        } else if (*devices) {
            session.update_devices_data();
            for (const auto& d : session.devices()) std::printf("%s\n", records::format_device(d).c_str());
        } else if (*state) {
            session.ensure_fresh();
            print_states(session);
        } else if (*map_cmd) {
            session.ensure_fresh();
            std::fputs(client::render_ascii(session.scene()).c_str(), stdout);
        } else if (*cmd) {
            session.command(cmd_args.oid, cmd_args.action, cmd_args.arg);
            std::printf("OK\n");
        } else if (*sched_list) {
            for (const auto& t : session.list_schedules()) std::printf("%s\n", records::format_schedule(t).c_str());
        } else if (*sched_put) {
            session.define_schedule(sched_args.task());
            std::printf("OK\n");
        } else if (*sched_enable) {
            session.set_schedule_enabled(sched_enable_args.id, sched_enable_args.enabled == 1);
            std::printf("OK\n");
        } else if (*rule_list) {
            for (const auto& r : session.list_rules()) std::printf("%s\n", records::format_rule(r).c_str());
        } else if (*rule_put) {
            session.define_rule(rule_args.rule());
            std::printf("OK\n");
        } else if (*rule_enable) {
            session.set_rule_enabled(rule_enable_args.id, rule_enable_args.enabled == 1);
            std::printf("OK\n");
        } else if (*sms_cmd) {
            session.sms_command(sms_cmd_args.oid, sms_cmd_args.action, sms_cmd_args.arg);
            std::printf("OK\n");
        } else if (*sms_sched_put) {
            session.sms_define_schedule(sms_sched_args.task());
            std::printf("OK\n");
        } else if (*sms_sched_enable) {
            session.sms_set_schedule_enabled(sms_sched_enable_args.id, sms_sched_enable_args.enabled == 1);
            std::printf("OK\n");
        } else if (*sms_rule_put) {
            session.sms_define_rule(sms_rule_args.rule());
            std::printf("OK\n");
        } else if (*sms_rule_enable) {
            session.sms_set_rule_enabled(sms_rule_enable_args.id, sms_rule_enable_args.enabled == 1);
            std::printf("OK\n");
        }
    } catch (const client::ClientError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    }
    return client::kExitOk;
}
