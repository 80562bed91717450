/* tslint:disable */
/* eslint-disable */

/**
 * Kirwan index β of a named point of the same example at `chi`.
 */
export function beta(point: string, chi: string): string;

/**
 * Hilbert–Mumford verdict of a named point of the two-points-and-a-line
 * example at the character `chi` (comma-separated rationals).
 */
export function classify(point: string, chi: string): string;

/**
 * The 27 torus weights of the two-points-and-a-line example, their hull
 * vertices and the named points a user can pick.
 */
export function hexagon(): string;

/**
 * Weight ladder and adapted window of a shipped scenario under L^{⊗scale}.
 */
export function ladder_window(name: string, scale: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly beta: (a: number, b: number, c: number, d: number) => [number, number];
    readonly classify: (a: number, b: number, c: number, d: number) => [number, number];
    readonly hexagon: () => [number, number];
    readonly ladder_window: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
