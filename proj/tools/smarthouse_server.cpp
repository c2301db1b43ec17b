// smarthouse-server: authoring commands for the store file plus the gateway
// daemon that runs the simulated house.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <ctime>
#include <fstream>
#include <mutex>
#include <sstream>

#include "smarthouse/auth.hpp"
#include "smarthouse/demo.hpp"
#include "smarthouse/home_server.hpp"
#include "smarthouse/map_codec.hpp"
#include "smarthouse/text.hpp"

namespace {

using namespace smarthouse;

volatile std::sig_atomic_t g_stop = 0;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ServerConfig load_config(const std::string& path, std::string& host, int& port) {
    const auto j = nlohmann::json::parse(read_file(path));
    ServerConfig cfg;
    cfg.auth.special_code = j.at("special_code").get<std::string>();
    cfg.auth.shared_secret = j.at("shared_secret").get<std::string>();
    cfg.auth.ttl = std::chrono::seconds(j.value("ttl_seconds", 300));
    if (j.contains("host")) host = j["host"].get<std::string>();
    if (j.contains("port")) port = j["port"].get<int>();
    if (auto p = j.find("poll_seconds"); p != j.end()) {
        cfg.periods.vital = SimTime{static_cast<std::int64_t>(p->value("vital", 1.0) * 1000)};
        cfg.periods.security = SimTime{static_cast<std::int64_t>(p->value("security", 5.0) * 1000)};
        cfg.periods.ambient = SimTime{static_cast<std::int64_t>(p->value("ambient", 60.0) * 1000)};
    }
    return cfg;
}

SimTime local_time_of_day() {
    const std::time_t t = std::time(nullptr);
    std::tm local{};
    localtime_r(&t, &local);
    return SimTime{((local.tm_hour * 60 + local.tm_min) * 60 + local.tm_sec) * 1000LL};
}

/// Whole days past the newest stored timestamp, plus today's local time.
SimTime start_time(const Snapshot& snap) {
    std::int64_t newest = 0;
    for (const auto& [_, s] : snap.states) newest = std::max(newest, s.timestamp.count());
    const auto days = newest / kDay.count() + (newest > 0 ? 1 : 0);
    return SimTime{days * kDay.count()} + local_time_of_day();
}

std::optional<std::set<Oid>> parse_allow(const std::string& allow) {
    if (allow.empty() || allow == "*") return std::nullopt;
    std::set<Oid> oids;
    for (auto part : text::split(allow, ',')) {
        const auto v = text::parse_int(part);
        if (!v || *v < 1) throw std::runtime_error("bad oid in --allow: " + std::string(part));
        oids.insert(*v);
    }
    return oids;
}

int run(const std::string& store_path, const std::string& config_path, std::string host, int port,
        const std::string& scenario_path, double speed, int persist_every, const std::string& traffic_path,
        const std::string& ui_dir, bool demo_behaviors, std::optional<double> virtual_start) {
    const auto cfg = load_config(config_path, host, port);
    auto snap = Store::restore(store_path);
    const auto start = virtual_start ? SimTime{static_cast<std::int64_t>(*virtual_start * 1000)} : start_time(snap);
    HomeServer server(cfg, std::move(snap), start);

    if (demo_behaviors) demo::attach_behaviors(server.fleet());
    if (!scenario_path.empty()) server.fleet().load_scenario(sim::parse_scenario(read_file(scenario_path)));

    std::ofstream traffic;
    std::mutex traffic_mutex;
    if (!traffic_path.empty()) {
        traffic.open(traffic_path, std::ios::app);
        if (!traffic) throw std::runtime_error("cannot open " + traffic_path);
        server.gateway().set_observer([&](std::string_view req, std::string_view resp) {
            std::lock_guard lock(traffic_mutex);
            traffic << ">> " << req << "\n" << resp << std::flush;
        });
    }
    server.set_fired_observer([](const automation::FiredAction& f) {
        spdlog::info("{} {} fired {} on oid {}{}", f.source == automation::FiredAction::Source::schedule ? "schedule" : "rule",
                     f.source_id, f.call.action, f.call.oid, f.dispatched ? "" : " (dispatch failed: " + f.error + ")");
    });

    HttpFrontend http(server);
    if (!ui_dir.empty()) http.mount_ui(ui_dir);
    const int bound = http.start(host, port);
    std::printf("listening on %s:%d\n", host.c_str(), bound);
    std::fflush(stdout);

    RealtimeDriver driver(server, speed);
    driver.start();

    std::signal(SIGINT, [](int) { g_stop = 1; });
    std::signal(SIGTERM, [](int) { g_stop = 1; });
    auto last_persist = std::chrono::steady_clock::now();
    while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        if (persist_every > 0 && std::chrono::steady_clock::now() - last_persist >= std::chrono::seconds(persist_every)) {
            server.store().persist(store_path);
            last_persist = std::chrono::steady_clock::now();
        }
    }
    driver.stop();
    http.stop();
    server.store().persist(store_path);
    spdlog::info("store saved to {}", store_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart house control server"};
    app.require_subcommand(1);

    std::string store_path;
    std::string password;

    auto* init = app.add_subcommand("init", "Create a store file holding the demo house");
    bool force = false;
    init->add_option("--store", store_path, "Store file to create")->required();
    init->add_option("--password", password, "Password for the admin user")->required();
    init->add_flag("--force", force, "Overwrite an existing store");

    auto* add_user = app.add_subcommand("add-user", "Add or replace a user");
    std::string username, role = "mobile", allow = "*";
    add_user->add_option("--store", store_path)->required();
    add_user->add_option("--name", username)->required();
    add_user->add_option("--password", password)->required();
    add_user->add_option("--role", role)->check(CLI::IsMember({"admin", "mobile"}));
    add_user->add_option("--allow", allow, "Comma-separated oids this user may control, or *");

    auto* set_scene = app.add_subcommand("set-scene", "Replace the map with a scene file");
    std::string scene_path;
    set_scene->add_option("--store", store_path)->required();
    set_scene->add_option("--scene", scene_path)->required();

    auto* run_cmd = app.add_subcommand("run", "Serve the gateway and run the simulated house");
    std::string config_path, host = "127.0.0.1", scenario_path, traffic_path, ui_dir;
    int port = 8080, persist_every = 60;
    double speed = 1.0;
    bool demo_behaviors = false;
    std::optional<double> virtual_start;
    run_cmd->add_option("--store", store_path)->required();
    run_cmd->add_option("--config", config_path, "JSON with special_code, shared_secret, ttl_seconds")->required();
    run_cmd->add_option("--host", host);
    run_cmd->add_option("--port", port, "0 picks a free port");
    run_cmd->add_option("--scenario", scenario_path, "Sensor scenario script");
    run_cmd->add_option("--speed", speed, "Simulated seconds per wall second");
    run_cmd->add_option("--persist-every", persist_every, "Seconds between store saves, 0 = only at exit");
    run_cmd->add_option("--traffic-log", traffic_path, "Append every request/response here");
    run_cmd->add_option("--ui-dir", ui_dir, "Static files served under /ui/");
    run_cmd->add_option("--virtual-start", virtual_start, "Start the simulated clock at this many seconds");
    run_cmd->add_flag("--demo-behaviors", demo_behaviors, "Attach scripted sensors of the demo house");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*init) {
            if (std::filesystem::exists(store_path) && !force)
                throw std::runtime_error(store_path + " exists (use --force)");
            Store store(demo::house(password));
            store.persist(store_path);
            std::printf("wrote %s\n", store_path.c_str());
        } else if (*add_user) {
            const auto parsed_role = parse_role(role);
            Store store(Store::restore(store_path));
            store.put_user(auth::make_user(username, password, *parsed_role, parse_allow(allow)));
            store.persist(store_path);
        } else if (*set_scene) {
            Store store(Store::restore(store_path));
            store.set_scene(map::decode_scene(read_file(scene_path)));
            store.persist(store_path);
        } else if (*run_cmd) {
            return run(store_path, config_path, host, port, scenario_path, speed, persist_every, traffic_path, ui_dir,
                       demo_behaviors, virtual_start);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
