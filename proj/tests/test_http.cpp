#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace smarthouse;
using namespace smarthouse::client;

TEST(Http, ClientOverRealSocket) {
    fixtures::House house;
    const auto ui = std::filesystem::temp_directory_path() / ("smarthouse_ui_" + std::to_string(::getpid()));
    std::filesystem::create_directories(ui);
    std::ofstream(ui / "index.html") << "<html>remote</html>";

    HttpFrontend http(*house.server);
    http.mount_ui(ui);
    const int port = http.start("127.0.0.1", 0);
    ASSERT_GT(port, 0);

    HttpTransport transport("127.0.0.1:" + std::to_string(port));
    auto s = ClientSession::login(transport, fixtures::client_config(), fixtures::kPassword);
    s.update_devices_data();
    s.update_information();
    EXPECT_EQ(s.devices().size(), 8u);
    s.command(demo::kLamp, "set_on");
    s.sms_command(demo::kFrontDoor, "open");
    EXPECT_EQ(house.server->fleet().pending_commands(), 2u);

    EXPECT_EQ(transport.get("/m/unknown"), "ERR PATH\n");
    EXPECT_EQ(transport.get("/elsewhere"), "ERR PATH\n");
    EXPECT_EQ(transport.get("/ui/index.html"), "<html>remote</html>");
    http.stop();
    std::filesystem::remove_all(ui);
}

TEST(Http, UnreachableServerIsNetworkError) {
    HttpTransport transport("127.0.0.1:1");
    EXPECT_THROW(ClientSession::login(transport, fixtures::client_config(), "x"), NetworkError);
}
