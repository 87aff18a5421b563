/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_separation_inputSir: (a: number) => number;
export const __wbg_get_separation_msc: (a: number) => number;
export const __wbg_get_separation_outputSir: (a: number) => number;
export const __wbg_roomresponse_free: (a: number, b: number) => void;
export const __wbg_separation_free: (a: number, b: number) => void;
export const __wbg_set_separation_inputSir: (a: number, b: number) => void;
export const __wbg_set_separation_msc: (a: number, b: number) => void;
export const __wbg_set_separation_outputSir: (a: number, b: number) => void;
export const competitorSequence: (a: number, b: number) => [number, number, number, number];
export const roomResponse: (a: number, b: number, c: number) => [number, number, number];
export const roomresponse_criticalDistance: (a: number) => number;
export const roomresponse_measuredT60: (a: number) => number;
export const roomresponse_samples: (a: number) => [number, number];
export const separate: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
