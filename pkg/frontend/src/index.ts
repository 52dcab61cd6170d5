export * from "./protocol";
export * from "./state";
export * from "./view";
export * from "./client";
