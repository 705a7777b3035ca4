#!/usr/bin/env node
import { adaptTranscript } from "./adapt.js";
import { runCli } from "./cli.js";

process.exit(runCli("adapt-transcript", adaptTranscript));
