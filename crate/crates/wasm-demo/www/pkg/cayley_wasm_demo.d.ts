/* tslint:disable */
/* eslint-disable */

/**
 * A catalogue construction; `0` leaves a parameter at its default.
 */
export function example(kind: number, m: number, a: number, b: number, k: number): string;

/**
 * Largest strongly diamond-free poset on the given levels.
 */
export function search_max(group: string, gens: string, levels: string, max_nodes: number): string;

/**
 * Total variation and max deviation of the uniform walk on `gens`,
 * `k = 0..=k_max`.
 */
export function tv_curve(group: string, gens: string, k_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly example: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly search_max: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly tv_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
