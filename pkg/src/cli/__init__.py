from src.cli.main import RunManifest, build_parser, main
